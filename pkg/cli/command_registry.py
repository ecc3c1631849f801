import argparse
from typing import Dict, List, Any, Optional, Callable
from dataclasses import dataclass, field
from enum import Enum


class ParameterType(Enum):
    STRING = "string"
    INTEGER = "integer"
    BOOLEAN = "boolean"
    PATH = "path"
    CHOICE = "choice"


@dataclass
class CommandParameter:
    name: str
    type: ParameterType
    description: str
    required: bool = False
    default: Any = None
    flag: Optional[str] = None
    choices: Optional[List[str]] = None
    positional: bool = False

    @property
    def option(self) -> str:
        return self.flag or "--" + self.name.replace("_", "-")


@dataclass
class CommandMetadata:
    name: str
    description: str
    parameters: List[CommandParameter]
    category: str
    callable_func: Optional[Callable] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


class CommandRegistry:
    def __init__(self):
        self._commands: Dict[str, CommandMetadata] = {}

    def register_command(
        self,
        name: str,
        description: str,
        parameters: List[CommandParameter],
        category: str,
        callable_func: Optional[Callable] = None,
        metadata: Optional[Dict[str, Any]] = None
    ) -> None:
        """Register a new command in the registry."""
        if name in self._commands:
            raise ValueError(f"Command '{name}' is already registered")

        self._commands[name] = CommandMetadata(
            name=name,
            description=description,
            parameters=parameters,
            category=category,
            callable_func=callable_func,
            metadata=metadata or {}
        )

    def get_command(self, name: str) -> Optional[CommandMetadata]:
        return self._commands.get(name)

    def list_commands(self, category: Optional[str] = None) -> List[CommandMetadata]:
        """List all registered commands, optionally filtered by category."""
        if category:
            return [command for command in self._commands.values() if command.category == category]
        return list(self._commands.values())

    def get_command_names(self) -> List[str]:
        return list(self._commands.keys())

    def get_command_description(self, name: str) -> str:
        """Human-readable description of a command and its parameters."""
        command = self.get_command(name)
        if not command:
            return f"Command '{name}' not found"

        params_desc = []
        for param in command.parameters:
            required_str = "required" if param.required else "optional"
            default_str = f", default={param.default}" if param.default not in (None, False) else ""
            label = param.name if param.positional else param.option
            params_desc.append(
                f"  - {label} ({param.type.value}, {required_str}{default_str}): {param.description}"
            )

        params_text = "\n".join(params_desc) if params_desc else "  No parameters"

        return f"""Command: {command.name}
Category: {command.category}
Description: {command.description}
Parameters:
{params_text}"""

    def build_parser(self, parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
        """Add one argparse subcommand per registered command."""
        subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
        for command in self._commands.values():
            sub = subparsers.add_parser(command.name, help=command.description, description=command.description)
            for param in command.parameters:
                self._add_argument(sub, param)
        return parser

    @staticmethod
    def _add_argument(parser: argparse.ArgumentParser, param: CommandParameter) -> None:
        if param.positional:
            parser.add_argument(param.name, choices=param.choices, help=param.description)
            return
        kwargs: Dict[str, Any] = {"dest": param.name, "help": param.description}
        if param.type == ParameterType.BOOLEAN:
            kwargs["action"] = "store_true"
        else:
            kwargs["default"] = param.default
            kwargs["required"] = param.required
            if param.type == ParameterType.INTEGER:
                kwargs["type"] = int
            if param.choices:
                kwargs["choices"] = param.choices
        parser.add_argument(param.option, **kwargs)

    def call_command(self, command_name: str, /, **kwargs) -> Any:
        """Call a registered command; its own parameters may use any name, including ``name``."""
        command = self.get_command(command_name)
        if not command:
            raise ValueError(f"Command '{command_name}' not found")

        if not command.callable_func:
            raise ValueError(f"Command '{command_name}' has no callable function registered")

        accepted = {param.name for param in command.parameters}
        return command.callable_func(**{key: value for key, value in kwargs.items() if key in accepted})


def _query_parameters() -> List[CommandParameter]:
    return [
        CommandParameter(
            name="net",
            type=ParameterType.PATH,
            description="Network file (JSON)",
            required=True,
        ),
        CommandParameter(
            name="class_node",
            type=ParameterType.STRING,
            description="Class node to classify",
            flag="--class",
        ),
        CommandParameter(
            name="evidence",
            type=ParameterType.STRING,
            description="Observed nodes as K=V,K=V",
        ),
        CommandParameter(
            name="query",
            type=ParameterType.PATH,
            description="Query file (JSON); flags given on the command line take precedence",
        ),
        CommandParameter(
            name="cap",
            type=ParameterType.INTEGER,
            description="Enumeration cap for cutset assignments and completions",
        ),
    ]


def _output_parameter() -> CommandParameter:
    return CommandParameter(
        name="output",
        type=ParameterType.CHOICE,
        description="Report format",
        default="table",
        choices=["table", "json"],
    )


def create_default_command_registry() -> CommandRegistry:
    """Create and populate a registry with the engine's commands."""
    from cli import commands

    registry = CommandRegistry()

    registry.register_command(
        name="classify",
        description="Undominated classes under credal dominance, with the pairwise matrix and cutset products.",
        parameters=_query_parameters() + [
            CommandParameter(
                name="bounds",
                type=ParameterType.BOOLEAN,
                description="Also report posterior bounds over the completions (Bayesian networks)",
            ),
            CommandParameter(
                name="naive",
                type=ParameterType.BOOLEAN,
                description="Also report the naive posterior that treats the missing nodes as missing at random",
            ),
            _output_parameter(),
        ],
        category="classification",
        callable_func=commands.run_classify,
    )

    registry.register_command(
        name="dominance",
        description="Test whether one class credal-dominates another.",
        parameters=_query_parameters() + [
            CommandParameter(
                name="better",
                type=ParameterType.STRING,
                description="Candidate dominating class",
                required=True,
            ),
            CommandParameter(
                name="worse",
                type=ParameterType.STRING,
                description="Candidate dominated class",
                required=True,
            ),
            _output_parameter(),
        ],
        category="classification",
        callable_func=commands.run_dominance,
    )

    registry.register_command(
        name="posterior",
        description="Range of the class posterior over every completion of the missing nodes.",
        parameters=_query_parameters() + [_output_parameter()],
        category="posterior",
        callable_func=commands.run_posterior,
    )

    registry.register_command(
        name="naive",
        description="Class posterior with the missing nodes summed out.",
        parameters=_query_parameters() + [_output_parameter()],
        category="posterior",
        callable_func=commands.run_naive,
    )

    registry.register_command(
        name="validate",
        description="Parse and validate a network file, or print the JSON schema of the format.",
        parameters=[
            CommandParameter(
                name="net",
                type=ParameterType.PATH,
                description="Network file (JSON)",
            ),
            CommandParameter(
                name="schema",
                type=ParameterType.BOOLEAN,
                description="Print the JSON schema of the network format instead",
            ),
            _output_parameter(),
        ],
        category="files",
        callable_func=commands.run_validate,
    )

    registry.register_command(
        name="demo",
        description="Run a worked example: the Asia network or the Monty Hall game.",
        parameters=[
            CommandParameter(
                name="name",
                type=ParameterType.CHOICE,
                description="Which example to run",
                choices=["asia", "montyhall"],
                positional=True,
            ),
            _output_parameter(),
        ],
        category="demos",
        callable_func=commands.run_demo,
    )

    return registry


if __name__ == "__main__":
    registry = create_default_command_registry()

    print("=" * 80)
    print("Command Registry - All Registered Commands")
    print("=" * 80)
    print()

    for command_name in registry.get_command_names():
        print(registry.get_command_description(command_name))
        print()

    print("\nCommands by category:")
    categories = set(command.category for command in registry.list_commands())
    for category in sorted(categories):
        in_category = registry.list_commands(category=category)
        print(f"  {category}: {', '.join(command.name for command in in_category)}")
