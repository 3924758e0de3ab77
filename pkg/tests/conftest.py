import math

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from arms_race_lab.contest import (
    AmplificationFamily,
    AmplificationSpec,
    ErosionFamily,
    ErosionSpec,
    ModelParams,
)

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def rel_close(x, y, rtol, atol=0.0):
    return abs(x - y) <= max(rtol * max(abs(x), abs(y)), atol)


def log_hyp(q0=0.3, alpha=1.0, beta=1.5, V=10.0, B=10.0, **kw):
    return ModelParams(
        q0=q0,
        h=AmplificationSpec(AmplificationFamily.LOGARITHMIC, alpha=alpha),
        delta=ErosionSpec(ErosionFamily.HYPERBOLIC, beta=beta),
        V=V, B=B, **kw,
    )


@pytest.fixture
def fig1_mid():
    """Middle panel of the figure 1 defaults."""
    return log_hyp()


amplifications = st.builds(
    AmplificationSpec,
    family=st.sampled_from(list(AmplificationFamily)),
    alpha=st.floats(0.05, 5.0),
    saturation=st.floats(0.1, 5.0),
)

erosions = st.builds(
    ErosionSpec,
    family=st.sampled_from(list(ErosionFamily)),
    delta0=st.floats(0.1, 1.0),
    beta=st.floats(0.05, 10.0),
    k=st.floats(0.2, 1.0),
)

params = st.builds(
    ModelParams,
    q0=st.floats(0.02, 0.98),
    h=amplifications,
    delta=erosions,
    s=st.floats(0.1, 5.0),
    V=st.floats(0.5, 50.0),
    B=st.floats(0.5, 50.0),
    c_d=st.floats(0.2, 5.0),
    c_a=st.floats(0.2, 5.0),
)

efforts = st.floats(0.0, 20.0)


def finite(x):
    return isinstance(x, float) and math.isfinite(x)


# Acceptance criteria report one line each at the end of the run.
_criteria = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    key = props["criterion"]
    if report.when == "call" or (report.when == "setup" and report.failed):
        _criteria[key] = (report.passed, props.get("title", ""), props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        passed, title, detail = _criteria[key]
        line = f"criterion {key:2d}: {'PASS' if passed else 'FAIL'}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
