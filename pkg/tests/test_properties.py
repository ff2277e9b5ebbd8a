import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from bchubbard.analysis import monogamy_eta, pair_record
from bchubbard.correlations import (
    concurrence,
    concurrence_region1,
    discord_cc_xstate,
    discord_kspace,
    mutual_information,
    negativity,
)
from bchubbard.measurement_search import bronzan_unitary
from bchubbard.phase_model import (
    BOUNDARY_TOL,
    PhaseLabel,
    classify_phase,
    energy_density,
    ground_state_densities,
    odlro,
)
from bchubbard.rdm import (
    TwoSiteParams,
    eta_pair_one_site_rdm,
    eta_pair_two_site_rdm,
    gamma,
    mode_params,
    one_site_rdm,
    qubit_block,
    two_mode_rdm,
    two_site_rdm,
)
from bchubbard.verify import phase_by_inequalities

unit = st.floats(0.0, 1.0, allow_nan=False)
couplings = st.floats(-10.0, 10.0, allow_nan=False)
distances = st.integers(1, 200)
angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


@st.composite
def densities(draw):
    n_s = draw(unit)
    n_d = draw(unit) * (1.0 - n_s)
    return n_s, n_d


@settings(max_examples=200, deadline=None)
@given(couplings, couplings)
def test_densities_are_physical(u, mu):
    n_s, n_d = ground_state_densities(u, mu)
    assert 0.0 <= n_s <= 1.0 and 0.0 <= n_d and n_s + n_d <= 1.0 + 1e-15


@settings(max_examples=200, deadline=None)
@given(couplings, couplings, densities())
def test_minimum_beats_any_feasible_point(u, mu, dens):
    n_s, n_d = ground_state_densities(u, mu)
    assert energy_density(n_s, n_d, u, mu) <= energy_density(*dens, u, mu) + 1e-12


@settings(max_examples=300, deadline=None)
@given(couplings, couplings)
def test_classification_matches_inequalities(u, mu):
    # points within the boundary tolerance of a line are snapped onto it
    assume(abs(mu) > BOUNDARY_TOL or mu == 0.0)
    assert classify_phase(u, mu) is phase_by_inequalities(u, mu)


@settings(max_examples=200, deadline=None)
@given(couplings, st.floats(0.0, 10.0))
def test_particle_hole_mirror(u, mu):
    # mu -> -mu swaps the empty-site and double-occupancy densities
    assume(mu > 1e-9)
    n_s, n_d = ground_state_densities(u, mu)
    m_s, m_d = ground_state_densities(u, -mu)
    assert_allclose(n_s, m_s, atol=1e-12)
    assert_allclose(n_d, 1.0 - m_s - m_d, atol=1e-12)
    if classify_phase(u, -mu) is PhaseLabel.I:
        assert classify_phase(u, mu) is PhaseLabel.I_PRIME


@settings(max_examples=200, deadline=None)
@given(densities(), distances)
def test_two_site_rdm_invariants(dens, r):
    rho = two_site_rdm(TwoSiteParams.from_densities(*dens, r))
    assert_allclose(np.trace(rho.data).real, 1.0, atol=1e-12)
    assert rho.eigenvalues.min() >= 0.0
    one = one_site_rdm(*dens).data
    assert_allclose(rho.partial_trace(0).data, one, atol=1e-12)
    assert_allclose(rho.partial_trace(1).data, one, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), distances)
def test_nodal_factorisation_without_pairs(n_s, r):
    k = round(n_s * r)
    n_s = k / r
    rho = two_site_rdm(TwoSiteParams.from_densities(n_s, 0.0, r)).data
    one = one_site_rdm(n_s, 0.0).data
    assert_allclose(rho, np.kron(one, one), atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0, exclude_min=True, exclude_max=True), distances)
def test_region_one_analytic_identities(n_s, r):
    rec, _ = pair_record(n_s, 0.0, r)
    assert_allclose(rec.Q, rec.I - rec.C, atol=1e-12)
    assert -1e-12 <= rec.C <= rec.I + 1e-12
    assert -1e-12 <= rec.Q <= rec.I + 1e-12
    block = qubit_block(two_site_rdm(TwoSiteParams.from_densities(n_s, 0.0, r)), (0, 1))
    assert_allclose(concurrence_region1(n_s, gamma(n_s, r)), concurrence(block), atol=1e-7)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1.0 - 1e-6))
def test_region_three_swap_symmetry(n_d):
    block = qubit_block(two_site_rdm(TwoSiteParams.from_densities(0.0, n_d, 1)), (0, 2))
    t = block.data.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    assert_allclose(discord_cc_xstate(block)[0], discord_cc_xstate(t)[0], atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 300), st.data())
def test_eta_pairs_polygamous(L, data):
    N_d = data.draw(st.integers(1, L - 1))
    assert monogamy_eta(L, N_d).violated


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 400), st.data())
def test_eta_marginal(L, data):
    N_d = data.draw(st.integers(0, L))
    rho = eta_pair_two_site_rdm(L, N_d)
    assert_allclose(rho.partial_trace(1).data, eta_pair_one_site_rdm(L, N_d).data, atol=1e-12)
    assert_allclose(rho.partial_trace(0).data, eta_pair_one_site_rdm(L, N_d).data, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(densities())
def test_kspace_odlro_identity(dens):
    n_s, n_d = dens
    assume(n_s < 1.0 - 1e-9)
    a, _ = mode_params(n_s, n_d)
    assert_allclose((1.0 - n_s) ** 2 * discord_kspace(a) / 2.0, odlro(n_s, n_d), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(unit)
def test_kspace_negativity_ratio(a):
    rho = two_mode_rdm(a, paired=True)
    assert_allclose(negativity(rho), discord_kspace(a) / 2.0, atol=1e-12)
    assert_allclose(mutual_information(two_mode_rdm(a, paired=False)), 0.0, atol=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.lists(angles, min_size=6, max_size=6))
def test_bronzan_unitary(params):
    v = bronzan_unitary(*params)
    assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-13)
