import streamlit as st
import pandas as pd
import plotly.express as px

from quantum_classifier import complexity
from quantum_classifier.circuit import CircuitShape
from quantum_classifier.errors import QuantumClassifierError


def render():
    """Render the resource audit page"""

    st.title("🧮 Resource Audit")
    st.markdown("**Closed-form gate and qubit counts against the enumerated Toffoli decomposition**")

    col1, col2, col3, col4 = st.columns(4)

    with col1:
        num_classes = st.number_input("Classes (L)", min_value=2, max_value=16, value=5, step=1)
    with col2:
        units = st.number_input("Encoding units (k)", min_value=1, max_value=16, value=11, step=1)
    with col3:
        repetitions = st.number_input("Repetitions (m)", min_value=1, max_value=4, value=2, step=1)
    with col4:
        seed = st.number_input("Seed", min_value=0, value=0, step=1)

    check = st.checkbox(
        "Check unitary equivalence on every basis state",
        value=True,
        help="Runs the decomposed circuit against the direct multi-controlled circuit. Only available for t <= 3.",
    )

    if not st.button("🔍 Run Audit", type="primary"):
        st.info("Choose L, k and m, then run the audit.")
        return

    try:
        shape = CircuitShape(int(num_classes), int(repetitions), int(units))
        with st.spinner("Decomposing and simulating..."):
            report = complexity.audit(
                shape,
                int(units),
                seed=int(seed),
                check_equivalence=None if check else False,
            )
    except QuantumClassifierError as e:
        st.error(f"Audit failed: {e}")
        return

    render_report(report)


def render_report(report):
    """Metrics, comparison table and gate mix of one ResourceReport"""
    data = report.to_dict()

    col1, col2, col3, col4 = st.columns(4)

    with col1:
        st.metric("Label Qubits (t)", report.t)
    with col2:
        st.metric("Total Qubits", report.qubits_used, delta=report.qubits_used - report.formula_qubits or None)
    with col3:
        st.metric("Enumerated Gates", report.enumerated_total)
    with col4:
        st.metric("Circuit Depth", report.depth)

    if report.equivalence_checked:
        st.success("✅ Decomposed circuit matches the direct circuit and ancillas return to |0⟩")
    else:
        st.warning("⚠️ Equivalence check skipped")

    col1, col2 = st.columns(2)

    with col1:
        info_col, chart_col = st.columns([1, 10])
        with info_col:
            st.markdown("ℹ️", help="**Formula:** closed-form counts in t, k and m\n\n**Enumerated:** gates emitted by the decomposition after adjacent X and Toffoli pairs cancel.")

        with chart_col:
            st.markdown("#### Formula vs Enumeration")
            comparison = pd.DataFrame({
                'Quantity': ['Total gates', 'X gates', 'Qubits', 'Controlled-U gates'],
                'Formula': [
                    data['formula']['total_gates_exact'],
                    data['formula']['x_gates_exact'],
                    str(report.formula_qubits),
                    str(report.controlled_u_expected),
                ],
                'Enumerated': [
                    str(report.enumerated_total),
                    str(report.enumerated['x']),
                    str(report.qubits_used),
                    str(report.enumerated['controlled_u']),
                ],
            })
            st.dataframe(comparison, use_container_width=True, hide_index=True)

    with col2:
        st.markdown("#### Gate Mix")
        mix = pd.DataFrame({
            'Gate': list(report.enumerated.keys()),
            'Count': list(report.enumerated.values()),
        })
        fig_mix = px.bar(mix, x='Gate', y='Count', color='Gate', title="Enumerated Gates by Kind")
        fig_mix.update_layout(
            height=350,
            font=dict(color='white'),
            paper_bgcolor='rgba(0,0,0,0)',
            plot_bgcolor='rgba(0,0,0,0)',
            showlegend=False,
        )
        st.plotly_chart(fig_mix, use_container_width=True)

    st.markdown("#### Toffoli Gates per Control Value")
    toffoli = pd.DataFrame({
        'Control value': list(range(len(report.toffoli_per_control_value))),
        'Toffoli gates': report.toffoli_per_control_value,
    })
    fig_toffoli = px.bar(toffoli, x='Control value', y='Toffoli gates')
    fig_toffoli.update_layout(
        height=300,
        font=dict(color='white'),
        paper_bgcolor='rgba(0,0,0,0)',
        plot_bgcolor='rgba(0,0,0,0)',
    )
    st.plotly_chart(fig_toffoli, use_container_width=True)

    if report.notes:
        with st.expander("📝 Discrepancies", expanded=True):
            for note in report.notes:
                st.markdown(f"- {note}")

    st.download_button(
        label="⬇️ Download report (JSON)",
        data=pd.Series(data).to_json(indent=2),
        file_name=f"audit_L{report.num_classes}_k{report.k}_m{report.m}.json",
        mime="application/json",
    )
