import os

import streamlit as st

from modules import landing, training_curves, resource_audit
from quantum_classifier.logging_setup import configure_logging

RUNS_DIR_ENV = 'QCLASSIFY_RUNS_DIR'

# Set page configuration
st.set_page_config(
    page_title="Quantum Classifier",
    page_icon="⚛️",
    layout="wide",
    initial_sidebar_state="expanded",
    menu_items={
        'Get Help': None,
        'Report a bug': None,
        'About': "# Quantum Classifier dashboard"
    }
)


def initialize_session_state():
    """Initialize all necessary session state variables"""

    # Streamlit secrets first, then the environment
    try:
        runs_dir = st.secrets.get(RUNS_DIR_ENV, os.getenv(RUNS_DIR_ENV, 'runs'))
        log_level = st.secrets.get('QCLASSIFY_LOG_LEVEL', os.getenv('QCLASSIFY_LOG_LEVEL', 'INFO'))
    except Exception:
        runs_dir = os.getenv(RUNS_DIR_ENV, 'runs')
        log_level = os.getenv('QCLASSIFY_LOG_LEVEL', 'INFO')

    session_vars = {
        'runs_dir': runs_dir,
        'log_level': log_level,
    }

    for var, default_value in session_vars.items():
        if var not in st.session_state:
            st.session_state[var] = default_value


initialize_session_state()

try:
    configure_logging(st.session_state.log_level)
except ValueError:
    configure_logging('INFO')


def render_sidebar():
    """Render the global sidebar with the runs directory setting"""
    st.sidebar.title("⚛️ Quantum Classifier")
    st.sidebar.markdown("---")

    st.sidebar.subheader("📁 Training Runs")
    st.sidebar.caption("Directory searched recursively for metrics.csv")

    runs_dir = st.sidebar.text_input(
        "Runs directory",
        value=st.session_state.runs_dir,
        key="runs_dir_input"
    )

    if st.sidebar.button("🔄 Reload Runs"):
        st.session_state.runs_dir = runs_dir.strip()
        st.rerun()

    if runs_dir.strip() != st.session_state.runs_dir:
        st.session_state.runs_dir = runs_dir.strip()

    st.sidebar.markdown("---")

    with st.sidebar.expander("📋 Command Line", expanded=False):
        st.markdown("""
        ```bash
        quantum-classifier train --config run.cfg --out runs/digits
        quantum-classifier eval --checkpoint runs/digits/checkpoint_latest.json --test data/
        quantum-classifier audit --L 5 --k 11 --m 2
        ```
        """)


def main():
    """Main application entry point"""
    render_sidebar()

    tab1, tab2, tab3 = st.tabs([
        "🏠 Overview",
        "📈 Training Curves",
        "🧮 Resource Audit"
    ])

    with tab1:
        landing.render()

    with tab2:
        training_curves.render()

    with tab3:
        resource_audit.render()


if __name__ == "__main__":
    main()
