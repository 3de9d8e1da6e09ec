"""Profile integration, embedding and closed-curve diagnostics."""

import json
import math

import numpy as np
import pytest

from pelastica.closure import lambda_p, period
from pelastica.curve import (
    first_integral_residual,
    geodesic_curvature_check,
    integrate_profile,
    monotone_progression_check,
    psi_rate,
    tangent_vectors,
    trace_to_csv,
    trace_to_json,
    trace_to_svg,
)
from pelastica.errors import DomainError
from pelastica.qpotential import a_star, make_params


def test_profile_conserves_first_integral(g23_params):
    rho = period(g23_params)
    prof = integrate_profile(g23_params, 3.0 * rho, period_hint=rho)
    kappa = np.array([st.kappa for st in prof.states])
    kp = np.array([st.kappa_prime for st in prof.states])
    worst = float(np.max(first_integral_residual(0.3, g23_params.a, kappa, kp)))
    assert worst < 1e-8 * g23_params.a


def test_profile_returns_to_minimum_after_one_period(g23_params):
    rho = period(g23_params)
    prof = integrate_profile(g23_params, rho, period_hint=rho)
    end = prof.state_at(rho)
    assert end.kappa == pytest.approx(g23_params.beta, rel=1e-8)
    assert abs(end.kappa_prime) < 1e-8 * g23_params.beta
    # curvature stays within the arch
    kappa = np.array([st.kappa for st in prof.states])
    assert kappa.min() >= g23_params.beta * (1.0 - 1e-9)
    assert kappa.max() <= g23_params.alpha * (1.0 + 1e-9)


def test_psi_over_one_period_equals_lambda(g23_params):
    rho = period(g23_params)
    prof = integrate_profile(g23_params, rho, period_hint=rho)
    assert prof.state_at(rho).psi == pytest.approx(lambda_p(g23_params), rel=1e-9)


def test_psi_rate_on_shell_matches_raw_form():
    p, a = 0.3, 1.2
    params = make_params(p, a)
    k = math.sqrt(params.beta * params.alpha)
    q = a * k ** (2 * (1 - p)) - (1 - p) ** 2 * k**2 - p**2
    kp = k * math.sqrt(q) / (p * (1 - p))  # from the first integral
    raw = (1 - p) * math.sqrt(a) * k ** (2 - p) / (a * k ** (2 * (1 - p)) - p**2)
    assert float(psi_rate(p, a, k, kp)) == pytest.approx(raw, rel=1e-12)


def test_profile_rejects_nonpositive_span(g23_params):
    with pytest.raises(DomainError):
        integrate_profile(g23_params, 0.0)


def test_trace_closes_and_winds(g23_trace):
    assert g23_trace.closure_gap < 1e-6
    assert g23_trace.winding_number == 2
    assert monotone_progression_check(g23_trace)


def test_trace_points_on_unit_sphere(g23_trace):
    norms = np.linalg.norm(g23_trace.points, axis=1)
    assert float(np.max(np.abs(norms - 1.0))) < 1e-12


def test_trace_stays_in_open_upper_half(g23_trace):
    x = g23_trace.points[:, 0]
    assert np.all(x > 0.0) and np.all(x < 1.0)
    # the height maximum sits at the curvature minimum (x decreases in kappa)
    kappa = np.array([st.kappa for st in g23_trace.states])
    assert x.argmax() == kappa.argmin()
    p, a = g23_trace.params.p, g23_trace.params.a
    x_beta = p * g23_trace.params.beta ** (p - 1.0) / math.sqrt(a)
    assert float(x.max()) == pytest.approx(x_beta, rel=1e-9)


def test_tangents_are_unit_speed(g23_trace):
    tans = tangent_vectors(g23_trace)
    speeds = np.linalg.norm(tans, axis=1)
    assert float(np.max(np.abs(speeds - 1.0))) < 1e-8
    # tangency: orthogonal to the position on the sphere
    dots = np.einsum("ij,ij->i", tans, g23_trace.points)
    assert float(np.max(np.abs(dots))) < 1e-8


def test_geodesic_curvature_matches_profile(g23_trace):
    assert geodesic_curvature_check(g23_trace) < 1e-4


def test_exports_roundtrip(tmp_path, g23_trace):
    csv_path = tmp_path / "trace.csv"
    json_path = tmp_path / "trace.json"
    svg_path = tmp_path / "trace.svg"
    trace_to_csv(g23_trace, str(csv_path))
    trace_to_json(g23_trace, str(json_path))
    trace_to_svg(g23_trace, str(svg_path))

    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "s,kappa,kappa_prime,psi,x,y,z"
    assert len(lines) == len(g23_trace.states) + 1

    meta = json.loads(json_path.read_text())
    assert meta["n"] == 2 and meta["m"] == 3
    assert meta["closureGap"] == pytest.approx(g23_trace.closure_gap)
    assert len(meta["samples"]) == len(g23_trace.states)

    svg = svg_path.read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_trace_other_family_member(all_traces):
    trace = all_traces(0.3, 3, 5)
    assert trace.closure_gap < 1e-6
    assert trace.winding_number == 3


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_first_integral_residual_zero_on_shell(p):
    params = make_params(p, a_star(p) * 2.0)
    k = np.linspace(params.beta * 1.0001, params.alpha * 0.9999, 17)
    q = params.a * k ** (2 * (1 - p)) - (1 - p) ** 2 * k**2 - p**2
    kp = k * np.sqrt(q) / (p * (1 - p))
    res = first_integral_residual(p, params.a, k, kp)
    assert float(np.max(res)) < 1e-10 * params.a
