import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from incapax import antideg as ad
from incapax import channel as chn
from incapax import opalg
from incapax.zoo import amplitude_damping, completely_depolarizing, depolarizing, erasure

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def feas_cache():
    cache = {}

    def get(name, ch):
        if name not in cache:
            cache[name] = ad.antidegradability_feasibility(ch)
        return cache[name]

    return get


def sdp_antidegradable(ch):
    """Independent oracle: decide feasibility of the degrading SDP with cvxpy."""
    cp = pytest.importorskip("cvxpy")
    comp = chn.complementary(ch)
    d_e, d_b = comp.dim_out, ch.dim_out
    n = d_e * d_b
    j = cp.Variable((n, n), hermitian=True)
    # D(X) = d_e * Tr_1[(X^T (x) I) J]
    e_ops = []
    for i in range(d_e):
        for k in range(d_e):
            e = np.zeros((d_e, d_e))
            e[i, k] = 1
            e_ops.append((i, k, e))
    cons = [j >> 0, cp.partial_trace(j, (d_e, d_b), axis=1) == np.eye(d_e) / d_e]
    rng = np.random.default_rng(3)
    for _ in range(6):
        rho = opalg.random_state(ch.dim_in, rng)
        env = chn.apply(comp, rho)
        out = d_e * cp.partial_trace(cp.kron(env.T, np.eye(d_b)) @ j, (d_e, d_b), axis=0)
        target = chn.apply(ch, rho)
        cons.append(out == target)
    prob = cp.Problem(cp.Minimize(0), cons)
    prob.solve(solver="SCS", eps=1e-8)
    return prob.status in ("optimal", "optimal_inaccurate")


def test_erasure_half_feasible(feas_cache):
    res = feas_cache("e05", erasure(2, 0.5))
    assert res.status is ad.FeasStatus.FEASIBLE and res.feasible
    assert res.distance < 1e-7
    assert ad.degrading_residual(erasure(2, 0.5), res.degrader) < 1e-6
    w = np.linalg.eigvalsh(res.degrading_choi)
    assert w[0] > -1e-9


def test_erasure_low_undetermined(feas_cache):
    res = feas_cache("e03", erasure(2, 0.3))
    assert res.status is ad.FeasStatus.UNDETERMINED
    assert res.iterations == ad.MAX_ITER and res.distance > 1e-3
    assert res.degrader is None


def test_amplitude_damping(feas_cache):
    hi = feas_cache("a06", amplitude_damping(0.6))
    assert hi.feasible
    assert ad.degrading_residual(amplitude_damping(0.6), hi.degrader) < 1e-6
    lo = feas_cache("a04", amplitude_damping(0.4))
    assert lo.status is ad.FeasStatus.UNDETERMINED and lo.distance > 1e-3


def test_amplitude_damping_analytic_degrader():
    # the complement of AD(g) is AD(1-g); AD((2g-1)/g) o AD(1-g) = AD(g) for g >= 1/2
    for g in (0.6, 0.75, 0.9):
        comp_ad = amplitude_damping(1 - g)
        lhs = chn.compose(chn.superoperator(amplitude_damping((2 * g - 1) / g)), chn.superoperator(comp_ad))
        assert np.linalg.norm(lhs.mat - chn.superoperator(amplitude_damping(g)).mat) < 1e-12
        ch = amplitude_damping(g)
        assert ad.degrading_residual(ch, amplitude_damping((2 * g - 1) / g)) < 1e-12


@pytest.mark.parametrize("gamma,expected", [(0.6, True), (0.4, False)])
def test_amplitude_damping_against_sdp(gamma, expected):
    assert sdp_antidegradable(amplitude_damping(gamma)) is expected


def test_identity_infeasible():
    res = ad.antidegradability_feasibility(chn.identity_channel(2))
    assert res.status is ad.FeasStatus.INFEASIBLE and res.distance == float("inf")
    assert "least-squares" in res.note


def test_completely_depolarizing_feasible():
    res = ad.antidegradability_feasibility(completely_depolarizing(2))
    assert res.feasible and res.distance < 1e-7


def test_distance_history_nonincreasing(feas_cache):
    h = feas_cache("e03", erasure(2, 0.3)).history
    assert len(h) == ad.MAX_ITER
    assert np.all(h[100:] <= h[:-100] + 1e-12)


def test_erasure_sweep_no_flip_flops():
    ps = [0.3, 0.4, 0.5, 0.6, 0.7]
    flags = [ad.antidegradability_feasibility(erasure(2, p), max_iter=3000).feasible for p in ps]
    assert flags == sorted(flags)
    assert not flags[0] and flags[2] and flags[4]


def test_degrader_is_channel(feas_cache):
    res = feas_cache("e05", erasure(2, 0.5))
    cp, tp, _ = chn.is_cptp(chn.superoperator(res.degrader))
    assert cp and tp


def test_degrading_residual_shape_guard():
    with pytest.raises(ValueError, match="degrader"):
        ad.degrading_residual(erasure(2, 0.5), chn.identity_channel(2))


@pytest.mark.parametrize("name,build", [("e05", lambda: erasure(2, 0.5)), ("a06", lambda: amplitude_damping(0.6))])
def test_symmetric_extension_marginals(feas_cache, name, build):
    ch = build()
    ext = ad.build_symmetric_extension(ch, feas_cache(name, ch).degrader)
    rng = np.random.default_rng(11)
    states = [opalg.random_state(2, rng) for _ in range(50)]
    r1, r2 = ad.marginal_residuals(ext, states)
    assert r1 < 1e-6 and r2 < 1e-6
    assert ext.dims == (ch.dim_out, ch.dim_out)


def test_extension_guard_on_unitary_channel():
    ch = chn.unitary_channel(opalg.random_unitary(2, 0))
    # the environment of a unitary channel is trivial; no map recovers the output from it
    with pytest.raises(ValueError, match="degrading identity"):
        ad.build_symmetric_extension(ch, chn.Channel((np.ones((2, 1)) / np.sqrt(2),)))


def test_range_decompose():
    ch = erasure(2, 0.5)
    rng = np.random.default_rng(2)
    rho = opalg.random_state(2, rng)
    psi = chn.apply(ch, rho)
    tilde, sigma, pre = ad.range_decompose(psi, ch)
    assert np.linalg.norm(sigma) < 1e-12 and np.allclose(tilde, psi)
    assert np.allclose(chn.apply(ch, pre), psi)
    # the off-diagonal qubit/flag block lies outside the range
    x = np.zeros((3, 3), dtype=complex)
    x[0, 2] = x[2, 0] = 1
    tilde, sigma, _ = ad.range_decompose(x, ch)
    assert np.linalg.norm(tilde) < 1e-12 and np.allclose(sigma, x)
    with pytest.raises(ValueError):
        ad.range_decompose(np.eye(2), ch)


def test_range_decompose_constant_channel():
    rng = np.random.default_rng(4)
    psi = opalg.random_hermitian(3, rng)
    tilde, _, _ = ad.range_decompose(psi, completely_depolarizing(3))
    assert np.allclose(tilde, np.trace(psi) * np.eye(3) / 3)


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_range_decompose_orthogonal_split(seed):
    rng = np.random.default_rng(seed)
    ch = chn.random_channel(2, 3, 2, rng)
    psi = opalg.random_hermitian(3, rng)
    tilde, sigma, _ = ad.range_decompose(psi, ch)
    assert np.allclose(tilde + sigma, psi)
    s = chn.superoperator(ch).mat
    # sigma is orthogonal to the range of the superoperator
    assert np.linalg.norm(s.conj().T @ chn.vec(sigma)) < 1e-9
    assert abs(np.vdot(tilde, sigma)) < 1e-10


@pytest.fixture(scope="module")
def erasure_clone():
    ch = erasure(2, 0.5)
    res = ad.antidegradability_feasibility(ch)
    return ad.CloneMap.from_extension(ad.build_symmetric_extension(ch, res.degrader))


def test_clone_map_in_range(erasure_clone):
    rng = np.random.default_rng(5)
    states = [opalg.random_state(2, rng) for _ in range(50)]
    res = ad.clone_residuals(erasure_clone, states)
    assert max(res.values()) < 1e-6


def test_clone_map_out_of_range_adds_sigma_square(erasure_clone):
    x = np.zeros((3, 3), dtype=complex)
    x[0, 2] = x[2, 0] = 1
    out = erasure_clone(x)
    assert np.allclose(out, np.kron(x, x))
    assert np.allclose(ad.clone_map_apply(erasure_clone, x), out)


def test_clone_marginal_picks_up_trace_of_sigma():
    # erasure(2, 1) has range spanned by the flag; sigma = psi - psi~ can carry trace
    ch = erasure(2, 1.0)
    res = ad.antidegradability_feasibility(ch)
    cm = ad.CloneMap.from_extension(ad.build_symmetric_extension(ch, res.degrader))
    psi = np.diag([0.5, 0.0, 0.5]).astype(complex)
    tilde, sigma, _ = cm.decompose(psi)
    assert abs(np.trace(sigma) - 0.5) < 1e-12
    out = cm(psi)
    marg = opalg.partial_trace(out, (3, 3), 2)
    assert np.allclose(marg, tilde + np.trace(sigma) * sigma)


def _r_u(cm, u):
    # R_U = N_{U (x) U} o R o N_{U^dag}, evaluated pointwise
    uu = np.kron(u, u)
    return lambda psi: uu @ ad.clone_map_apply(cm, u.conj().T @ psi @ u) @ uu.conj().T


def test_pad_environment_in_range_cloning(erasure_clone):
    rng = np.random.default_rng(8)
    padded = ad.pad_environment(erasure_clone, 2)
    assert padded.dim == 6 and padded.source.dim_out == 6
    states = [opalg.random_state(2, rng) for _ in range(10)]
    assert max(ad.clone_residuals(padded, states).values()) < 1e-6
    psi = chn.apply(padded.source, states[0])
    e0 = np.diag([1.0, 0.0])
    assert np.allclose(psi, np.kron(chn.apply(erasure_clone.source, states[0]), e0))


@pytest.mark.parametrize("seed", range(5))
def test_covariance_identity(erasure_clone, seed):
    rng = np.random.default_rng(seed)
    padded = ad.pad_environment(erasure_clone, 2)
    u = opalg.random_unitary(6, rng)
    r_u = _r_u(padded, u)
    uu = np.kron(u, u)
    for _ in range(3):
        psi = opalg.random_state(6, rng)
        lhs = r_u(u @ psi @ u.conj().T)
        rhs = uu @ ad.clone_map_apply(padded, psi) @ uu.conj().T
        assert np.linalg.norm(lhs - rhs) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_r_u_clones_rotated_states(erasure_clone, seed):
    # any state unitarily equivalent to an in-range state is cloned by the matching R_U
    rng = np.random.default_rng(seed)
    padded = ad.pad_environment(erasure_clone, 2)
    u = opalg.random_unitary(6, rng)
    target = u @ chn.apply(padded.source, opalg.random_state(2, rng)) @ u.conj().T
    out = _r_u(padded, u)(target)
    assert np.linalg.norm(opalg.partial_trace(out, (6, 6), 1) - target) < 1e-6
    assert np.linalg.norm(opalg.partial_trace(out, (6, 6), 2) - target) < 1e-6


def test_clone_map_rejects_mismatched_extension():
    with pytest.raises(ValueError):
        ad.CloneMap(erasure(2, 0.5), chn.identity_channel(2))


def test_cloning_certificate():
    cert = ad.cloning_certificate(erasure(2, 0.5), channel_id="erasure")
    assert cert is not None and cert.reason.value == "Cloning"
    assert cert.channel_id == "erasure"
    assert "antidegradable" in cert.detail["justification"]
    assert cert.detail["distance"] < 1e-7
    assert ad.cloning_certificate(chn.identity_channel(2)) is None
    assert ad.cloning_certificate(completely_depolarizing(2)) is not None
    assert ad.cloning_certificate(erasure(2, 0.3), max_iter=500) is None


def test_depolarizing_high_noise_antidegradable():
    res = ad.antidegradability_feasibility(depolarizing(2, 0.7))
    assert res.feasible
