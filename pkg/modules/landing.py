import streamlit as st

from utils.run_loader import discover_runs
from quantum_classifier.errors import DataError


def render():
    """Render the overview page"""

    # Hero section
    st.markdown("""
        <div style="text-align: center; padding: 2rem 0;">
            <h1 style="font-size: 3.5rem; margin-bottom: 1rem; color: #00C5E7;">
                ⚛️ Quantum Classifier
            </h1>
            <h2 style="font-size: 1.8rem; margin-bottom: 2rem; color: #FAFAFA; font-weight: 300;">
                Parallel multi-class classification on a simulated quantum register
            </h2>
        </div>
    """, unsafe_allow_html=True)

    st.markdown("""
### What this dashboard shows

Every class owns a block of trainable SU(2) encoding gates. A label register in
uniform superposition selects which block acts on the sample register, so all
classes are loaded in one circuit. Training pushes the final state towards the
maximally entangled state of the two registers with Adam on a fidelity cost;
inference measures the sample register and reads the class off the outcome.

The dashboard only reads artifacts written by the `quantum-classifier` command
line: `metrics.csv` files of training runs and on-demand resource audits.
    """)

    st.markdown("---")

    st.markdown("### 🔺 Pages")

    col1, col2, col3 = st.columns(3)

    with col1:
        st.markdown("""
        #### 📈 Training Curves
        **Runs under the chosen directory**

        - Cost per Adam iteration
        - Train and test accuracy
        - Curves grouped by repetition count m
        - Final and best accuracy per run
        """)

    with col2:
        st.markdown("""
        #### 🧮 Resource Audit
        **Gate and qubit counts**

        - Closed-form gate and X-gate counts
        - Enumerated Toffoli decomposition
        - Ancilla and qubit totals
        - Decomposed circuit depth
        """)

    with col3:
        st.markdown("""
        #### 🖥️ Command Line
        **Where the data comes from**

        - `ingest` MNIST IDX files
        - `train` and `sweep` runs
        - `eval` checkpoints
        - `audit` resource reports
        """)

    st.markdown("---")

    st.markdown("### 🚀 Getting Started")

    setup_col1, setup_col2 = st.columns(2)

    with setup_col1:
        st.markdown("#### 1️⃣ Produce runs")
        st.code(
            "quantum-classifier ingest --images train-images-idx3-ubyte.gz \\\n"
            "    --labels train-labels-idx1-ubyte.gz --classes 1,7 \\\n"
            "    --train 200 --test 100 --seed 0 --out data/\n"
            "quantum-classifier sweep --config run.cfg --out runs/ --m 1,2,3",
            language="bash",
        )

    with setup_col2:
        st.markdown("#### 2️⃣ Point the sidebar at them")
        runs_dir = st.session_state.get('runs_dir', '')
        try:
            found = discover_runs(runs_dir) if runs_dir else []
        except DataError as e:
            st.warning(f"⚠️ {e}")
            found = []

        if found:
            st.success(f"✅ {len(found)} run(s) found under `{runs_dir}`")
        else:
            st.info("📊 No metrics.csv found yet. Set the runs directory in the sidebar.")

    st.markdown("---")

    st.markdown("""
    <div style="text-align: center; padding: 1rem; color: #888;">
        <small>
            Quantum Classifier dashboard<br>
            Statevector simulation, Adam training and resource auditing
        </small>
    </div>
    """, unsafe_allow_html=True)
