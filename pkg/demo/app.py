import streamlit as st
import logging
import sys
from datetime import datetime
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.commands import classify_report
from cli.formats import bundled_network_path, load_network, parse_network
from demo.monty_hall import monty_hall_demo
from networks.bayesnet import BayesNet
from networks.dominance import EvidenceQuery
from utils.errors import CredalError

PACKAGES = ('imprecise.', 'networks.', 'solvers.', 'oracle.', 'cli.', 'demo.')
MISSING_LABEL = "(missing)"


class StreamlitLogHandler(logging.Handler):
    """Custom log handler that captures logs for Streamlit display."""

    def __init__(self):
        super().__init__()
        self.log_records = []

    def emit(self, record):
        # Only capture logs from the engine's own modules
        if record.name.startswith(PACKAGES):
            log_entry = self.format(record)
            self.log_records.append({
                'timestamp': datetime.fromtimestamp(record.created),
                'level': record.levelname,
                'message': log_entry,
                'logger_name': record.name
            })

    def get_logs(self):
        return self.log_records

    def clear_logs(self):
        self.log_records = []


def setup_logging(log_level: str, log_handler: StreamlitLogHandler):
    """Route the engine's loggers to the Streamlit handler."""
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, log_level))

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    formatter = logging.Formatter(
        fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )
    log_handler.setFormatter(formatter)
    root_logger.addHandler(log_handler)

    for name in list(logging.Logger.manager.loggerDict):
        if name.startswith(PACKAGES):
            engine_logger = logging.getLogger(name)
            engine_logger.propagate = True
            engine_logger.setLevel(getattr(logging, log_level))


def load_selected_network(choice: str, uploaded):
    if choice == "Upload":
        if uploaded is None:
            return None
        return parse_network(uploaded.getvalue().decode("utf-8"))
    return load_network(bundled_network_path(choice))


def classification_tab(net):
    structure = net.structure
    class_node = st.selectbox("Class node", options=list(structure.names), index=list(structure.names).index("C") if "C" in structure.names else 0)

    st.subheader("Evidence")
    evidence = {}
    columns = st.columns(3)
    for position, name in enumerate(name for name in structure.names if name != class_node):
        states = [MISSING_LABEL] + [str(state) for state in structure.space(name).elements]
        with columns[position % 3]:
            value = st.selectbox(name, options=states, key=f"evidence-{name}")
        if value != MISSING_LABEL:
            evidence[name] = value

    bayesian = isinstance(net, BayesNet)
    bounds = st.checkbox("Posterior bounds over completions", value=bayesian, disabled=not bayesian)
    naive = st.checkbox("Naive posterior (missing at random)", value=bayesian, disabled=not bayesian)

    if st.button("Classify", type="primary", use_container_width=True):
        st.session_state.log_handler.clear_logs()
        try:
            st.session_state.report = classify_report(net, EvidenceQuery(class_node, evidence), bounds=bounds, naive=naive)
        except CredalError as e:
            st.session_state.report = None
            st.error(f"{type(e).__name__}: {e}")

    report = st.session_state.get("report")
    if report is None:
        return

    st.header("Results")
    st.metric("Undominated classes", ", ".join(report.undominated))
    st.subheader("Dominance matrix (row dominates column)")
    st.dataframe({column: [report.matrix[row][column] for row in report.classes] for column in report.classes})

    for pair in report.pairs:
        verdict = "dominates" if pair.dominates else "does not dominate"
        with st.expander(f"{pair.better} vs {pair.worse}: {pair.value:.6g} ({verdict})", expanded=False):
            st.write(f"Loop cutset: {pair.cutset or 'none'}")
            st.json([product.model_dump() for product in pair.products])

    if report.posterior_bounds:
        st.subheader("Posterior bounds")
        st.dataframe({
            "class": [interval.state for interval in report.posterior_bounds],
            "lower": [interval.lower for interval in report.posterior_bounds],
            "upper": [interval.upper for interval in report.posterior_bounds],
        })
    if report.naive_posterior:
        st.subheader("Naive posterior")
        st.json(report.naive_posterior)
    for note in report.notes:
        st.info(note)


def monty_hall_tab():
    delta = st.slider("Value of the car over a goat", min_value=0.5, max_value=5.0, value=1.0, step=0.5)
    report = monty_hall_demo(delta)
    for result in (report.standard, report.extended):
        st.subheader(f"{result.variant.capitalize()} game")
        left, right = st.columns(2)
        left.metric("Lower prevision of switch - stay", f"{result.switch_over_stay:.6g}")
        right.metric("Lower prevision of stay - switch", f"{result.stay_over_switch:.6g}")
        st.write(f"Maximal actions: {', '.join(result.maximal)} ({result.relation})")


def main():
    st.set_page_config(
        page_title="Credal Classifier",
        layout="wide"
    )

    st.title("Credal Classifier")
    st.markdown("Classification that stays valid whatever the reason some findings are missing")

    if 'log_handler' not in st.session_state:
        st.session_state.log_handler = StreamlitLogHandler()

    with st.sidebar:
        st.header("Configuration")

        log_level = st.selectbox(
            "Log Level",
            options=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
            index=1,
        )
        choice = st.selectbox("Network", options=["asia", "asia_widened", "Upload"])
        uploaded = st.file_uploader("Network file", type=["json"]) if choice == "Upload" else None
        show_logs = st.checkbox("Show Logs", value=False)

        if st.button("Clear Logs"):
            st.session_state.log_handler.clear_logs()
            st.rerun()

    setup_logging(log_level, st.session_state.log_handler)

    tabs = st.tabs(["Network classification", "Monty Hall"])
    with tabs[0]:
        try:
            net = load_selected_network(choice, uploaded)
        except CredalError as e:
            st.error(f"{type(e).__name__}: {e}")
            net = None
        if net is not None:
            classification_tab(net)
    with tabs[1]:
        monty_hall_tab()

    if show_logs:
        st.header("Execution Logs")
        logs = st.session_state.log_handler.get_logs()
        if logs:
            st.info(f"Total log entries: {len(logs)}")
            log_text = "\n".join(log['message'] for log in logs)
            st.code(log_text)
            st.download_button(
                label="Download Logs",
                data=log_text,
                file_name=f"credal_logs_{datetime.now().strftime('%Y%m%d_%H%M%S')}.txt",
                mime="text/plain"
            )
        else:
            st.info("No logs captured yet. Run a query to see logs.")


if __name__ == "__main__":
    main()
