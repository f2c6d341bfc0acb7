import streamlit as st
import plotly.express as px

from quantum_classifier.circuit import CircuitShape
from quantum_classifier.errors import DataError
from utils.run_loader import load_runs, summarize_runs


COST_HELP = (
    "**Data Used:** `cost` column of each metrics.csv\n\n"
    "**Insights:** Mean infidelity between the final and optimal states. "
    "The floor is 0 when L is a power of two, otherwise 1 - ((L+1)/2^t)^2 "
    f"({CircuitShape(5, 1, 1).cost_floor:.4f} for five classes)."
)


def _style(fig, xaxis_title, yaxis_title, height=450):
    fig.update_layout(
        height=height,
        font=dict(color='white'),
        paper_bgcolor='rgba(0,0,0,0)',
        plot_bgcolor='rgba(0,0,0,0)',
        xaxis_title=xaxis_title,
        yaxis_title=yaxis_title,
    )
    return fig


def render():
    """Render the training curves page"""

    st.title("📈 Training Curves")
    st.markdown("**Cost and accuracy per Adam iteration for every run under the runs directory**")

    runs_dir = st.session_state.get('runs_dir', '')
    if not runs_dir:
        st.warning("📊 Please set a runs directory in the sidebar to view training curves.")
        return

    try:
        df = load_runs(runs_dir)
    except DataError as e:
        st.error(f"Could not load runs: {e}")
        return

    if df.empty:
        st.info(f"No metrics.csv found under `{runs_dir}`.")
        return

    df['m'] = df['m'].fillna(0).astype(int).astype(str).replace('0', 'unknown')
    summary = summarize_runs(df)

    col1, col2, col3, col4 = st.columns(4)

    with col1:
        st.metric("Runs", len(summary))

    with col2:
        st.metric("Best Test Accuracy", f"{summary['best_test_acc'].max():.1%}")

    with col3:
        st.metric("Lowest Final Cost", f"{summary['final_cost'].min():.4f}")

    with col4:
        st.metric("Longest Run", f"{int(summary['iterations'].max())} iters")

    tab1, tab2, tab3 = st.tabs([
        "📉 Cost",
        "🎯 Accuracy",
        "📋 Run Summary"
    ])

    with tab1:
        info_col, chart_col = st.columns([1, 10])
        with info_col:
            st.markdown("ℹ️", help=COST_HELP)

        with chart_col:
            fig_cost = px.line(
                df,
                x='iter',
                y='cost',
                color='m',
                line_group='run',
                hover_name='run',
                markers=True,
                title="Cost by Iteration",
            )
            st.plotly_chart(_style(fig_cost, "Iteration", "Cost"), use_container_width=True)

    with tab2:
        split = st.radio("Accuracy on", ['test_acc', 'train_acc'], horizontal=True,
                         format_func=lambda c: 'Test set' if c == 'test_acc' else 'Training batch')

        fig_acc = px.line(
            df,
            x='iter',
            y=split,
            color='m',
            line_group='run',
            hover_name='run',
            markers=True,
            title="Accuracy by Iteration",
        )
        fig_acc.update_yaxes(range=[0, 1.05], tickformat='.0%')
        st.plotly_chart(_style(fig_acc, "Iteration", "Accuracy"), use_container_width=True)

        by_m = summary.groupby('m', as_index=False)['final_test_acc'].mean()
        fig_m = px.bar(
            by_m,
            x='m',
            y='final_test_acc',
            color='m',
            title="Mean Final Test Accuracy by Repetition Count",
        )
        fig_m.update_yaxes(range=[0, 1.05], tickformat='.0%')
        fig_m.update_layout(showlegend=False)
        st.plotly_chart(_style(fig_m, "Repetitions (m)", "Test Accuracy", height=350), use_container_width=True)

    with tab3:
        st.dataframe(
            summary,
            use_container_width=True,
            hide_index=True,
            column_config={
                'final_cost': st.column_config.NumberColumn("Final Cost", format="%.5f"),
                'final_test_acc': st.column_config.NumberColumn("Final Test Acc", format="%.3f"),
                'best_test_acc': st.column_config.NumberColumn("Best Test Acc", format="%.3f"),
            },
        )

        st.download_button(
            label="⬇️ Download all metrics",
            data=df.to_csv(index=False),
            file_name="all_metrics.csv",
            mime="text/csv",
        )
