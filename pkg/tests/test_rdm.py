import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bchubbard._validation import DomainError
from bchubbard.correlations import mutual_information, von_neumann_entropy
from bchubbard.rdm import (
    PAIRED_MODE_INDICES,
    DensityMatrix,
    TwoSiteParams,
    dicke_state_vector,
    eta_pair_one_site_rdm,
    eta_pair_two_site_rdm,
    gamma,
    mode_params,
    mode_rdm,
    one_site_rdm,
    partial_trace,
    populated_levels,
    qubit_block,
    reduced_state,
    two_mode_rdm,
    two_site_rdm,
)


def random_params(rng):
    n_s, n_d = rng.dirichlet([1.0, 1.0, 1.0])[:2]
    return TwoSiteParams.from_densities(n_s, n_d, int(rng.integers(1, 40)))


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), (2,))

    def test_rejects_bad_trace(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.diag([0.5, 0.6]), (2,))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.array([[0.5, 0.6], [0.6, 0.5]]), (2,))

    def test_rejects_dims_mismatch(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.eye(4) / 4, (3,))

    def test_clamps_tiny_negative_eigenvalues(self):
        rho = DensityMatrix(np.diag([1.0 + 5e-13, -5e-13]), (2,))
        assert rho.eigenvalues.min() == 0.0

    def test_read_only(self):
        rho = one_site_rdm(0.5, 0.25)
        with pytest.raises(ValueError):
            rho.data[0, 0] = 1.0

    def test_partial_trace_product(self):
        a = np.diag([0.3, 0.7])
        b = np.diag([0.1, 0.2, 0.7])
        rho = DensityMatrix(np.kron(a, b), (2, 3))
        assert_allclose(rho.partial_trace(0).data, a, atol=1e-15)
        assert_allclose(rho.partial_trace(1).data, b, atol=1e-15)
        with pytest.raises(DomainError):
            partial_trace(rho.data, rho.dims, 2)


class TestGamma:
    def test_values(self):
        assert_allclose(gamma(0.5, 1), 1 / math.pi, rtol=1e-15)
        assert_allclose(gamma(0.5, 2), 0.0, atol=1e-16)
        assert gamma(0.0, 5) == 0.0

    def test_zero_distance_rejected(self):
        with pytest.raises(DomainError):
            gamma(0.5, 0)


class TestOneSite:
    @pytest.mark.parametrize(
        "n_s, n_d, diag",
        [(0.5, 0.25, (0.25, 0.5, 0.25)), (1.0, 0.0, (0.0, 1.0, 0.0)), (0.0, 0.5, (0.5, 0.0, 0.5))],
    )
    def test_diagonal(self, n_s, n_d, diag):
        assert_allclose(one_site_rdm(n_s, n_d).data, np.diag(diag), atol=1e-16)

    def test_invalid(self):
        with pytest.raises(DomainError):
            one_site_rdm(0.6, 0.6)


class TestTwoSite:
    def test_nodal_point_factorises(self):
        rho = two_site_rdm(TwoSiteParams.from_densities(0.5, 0.0, 2))
        expected = np.diag([0.25, 0.25, 0, 0.25, 0.25, 0, 0, 0, 0])
        assert_allclose(rho.data, expected, atol=1e-16)
        one = one_site_rdm(0.5, 0.0).data
        assert_allclose(rho.data, np.kron(one, one), atol=1e-16)

    def test_pure_pair_block(self):
        for r in (1, 3, 17):
            rho = two_site_rdm(TwoSiteParams.from_densities(0.0, 0.5, r))
            block = rho.data[np.ix_([0, 2, 6, 8], [0, 2, 6, 8])]
            expected = np.array([[0.25, 0, 0, 0], [0, 0.25, 0.25, 0], [0, 0.25, 0.25, 0], [0, 0, 0, 0.25]])
            assert_allclose(block, expected, atol=1e-16)
            assert_allclose(np.trace(block).real, 1.0, atol=1e-15)

    def test_entries(self):
        p = TwoSiteParams.from_densities(0.3, 0.2, 2)
        c, g = p.c, p.gamma
        P = (1 - 0.3) ** 2 - g**2
        rho = two_site_rdm(p).data.real
        assert_allclose(c, 0.2 / 0.7, rtol=1e-15)
        assert_allclose(rho[0, 0], P * (1 - c) ** 2, rtol=1e-14)
        assert_allclose(rho[4, 4], 0.09 - g**2, rtol=1e-14)
        assert_allclose(rho[8, 8], c**2 * P, rtol=1e-14)
        assert_allclose(rho[1, 3], g * (1 - c), rtol=1e-14)
        assert_allclose(rho[5, 7], c * g, rtol=1e-14)
        assert_allclose(rho[2, 6], c * (1 - c) * P, rtol=1e-14)
        assert_allclose(rho[1, 1], (1 - 0.3 - P) * (1 - c), rtol=1e-14)
        assert_allclose(rho[5, 5], c * (1 - 0.3 - P), rtol=1e-14)

    def test_marginals_random(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            p = random_params(rng)
            rho = two_site_rdm(p)
            assert_allclose(np.trace(rho.data).real, 1.0, atol=1e-12)
            one = one_site_rdm(p.n_s, p.n_d).data
            assert_allclose(rho.partial_trace(0).data, one, atol=1e-12)
            assert_allclose(rho.partial_trace(1).data, one, atol=1e-12)
            assert rho.eigenvalues.min() >= 0.0

    def test_nodal_factorisation_general(self):
        # at the nodes only the pair coherence survives on top of the product
        for n_s, r in [(0.25, 4), (0.5, 6), (0.2, 5), (1 / 3, 3)]:
            n_d = 0.3 * (1 - n_s)
            p = TwoSiteParams.from_densities(n_s, n_d, r)
            rho = two_site_rdm(p).data.copy()
            one = one_site_rdm(n_s, n_d).data
            coherence = p.c * (1 - p.c) * (1 - n_s) ** 2
            assert_allclose(rho[2, 6], coherence, rtol=1e-12)
            rho[2, 6] = rho[6, 2] = 0.0
            assert_allclose(rho, np.kron(one, one), atol=1e-15)
            single = two_site_rdm(TwoSiteParams.from_densities(n_s, 0.0, r)).data
            assert_allclose(single, np.kron(one_site_rdm(n_s, 0.0).data, one_site_rdm(n_s, 0.0).data), atol=1e-15)

    def test_c_at_full_singles(self):
        assert TwoSiteParams.from_densities(1.0, 0.0, 1).c == 0.0

    def test_gamma_too_large_rejected(self):
        with pytest.raises(DomainError):
            TwoSiteParams.from_densities(0.5, 0.0, 1, gamma_value=0.6)

    def test_populated_levels(self):
        assert populated_levels(0.5, 0.0) == (0, 1)
        assert populated_levels(0.0, 0.4) == (0, 2)
        assert populated_levels(0.6, 0.4) == (1, 2)
        assert populated_levels(0.3, 0.3) == (0, 1, 2)
        assert populated_levels(1.0, 0.0) == (1,)

    def test_qubit_block(self):
        rho = two_site_rdm(TwoSiteParams.from_densities(0.4, 0.0, 1))
        block = qubit_block(rho, (0, 1))
        assert block.dims == (2, 2)
        with pytest.raises(DomainError):
            qubit_block(two_site_rdm(TwoSiteParams.from_densities(0.3, 0.3, 1)), (0, 1))


class TestModes:
    def test_params(self):
        a, b = mode_params(0.5, 0.25)
        assert_allclose((a, b), (0.5, 0.5), atol=1e-16)
        assert mode_params(1.0, 0.0) == (1.0, 0.0)

    @pytest.mark.parametrize("a, diag", [(0.5, [0.25] * 4), (1.0, [1, 0, 0, 0]), (0.25, [1 / 16, 3 / 16, 3 / 16, 9 / 16])])
    def test_mode_rdm(self, a, diag):
        assert_allclose(mode_rdm(a).data, np.diag(diag), atol=1e-16)

    def test_paired_spectrum(self):
        rho = two_mode_rdm(0.5, paired=True)
        w = np.sort(rho.eigenvalues)[::-1]
        assert_allclose(w[:3], [0.5, 0.25, 0.25], atol=1e-15)
        assert_allclose(w[3:], 0.0, atol=1e-15)
        assert_allclose(von_neumann_entropy(rho), 1.5, atol=1e-14)

    def test_paired_block_position(self):
        a = 0.3
        rho = two_mode_rdm(a, paired=True).data.real
        block = rho[np.ix_(PAIRED_MODE_INDICES, PAIRED_MODE_INDICES)]
        ab = a * (1 - a)
        assert_allclose(block, [[a * a, 0, 0, 0], [0, ab, ab, 0], [0, ab, ab, 0], [0, 0, 0, (1 - a) ** 2]], atol=1e-16)
        assert_allclose(np.abs(rho).sum(), np.abs(block).sum(), atol=1e-15)

    def test_unpaired(self):
        rho = two_mode_rdm(0.5, paired=False)
        assert_allclose(rho.data, np.eye(16) / 16, atol=1e-16)
        assert_allclose(von_neumann_entropy(rho), 4.0, atol=1e-13)
        for a in np.linspace(0, 1, 11):
            assert_allclose(mutual_information(two_mode_rdm(a, paired=False)), 0.0, atol=1e-12)

    def test_unpaired_spectrum_multiplicities(self):
        from scipy.special import comb

        a, b = 0.3, 0.7
        w = np.sort(two_mode_rdm(a, paired=False).eigenvalues)
        expected = np.sort(np.concatenate([[a**k * b ** (4 - k)] * int(comb(4, k)) for k in range(5)]))
        assert_allclose(w, expected, atol=1e-15)

    def test_marginals(self):
        for a in np.linspace(0, 1, 21):
            for paired in (True, False):
                pair = two_mode_rdm(a, paired)
                assert_allclose(pair.partial_trace(0).data, mode_rdm(a).data, atol=1e-12)
                assert_allclose(pair.partial_trace(1).data, mode_rdm(a).data, atol=1e-12)


class TestEtaPairs:
    def test_w_state(self):
        rho = eta_pair_two_site_rdm(3, 1).data.real
        third = 1 / 3
        assert_allclose(rho, [[third, 0, 0, 0], [0, third, third, 0], [0, third, third, 0], [0, 0, 0, 0]], atol=1e-15)

    def test_vacuum(self):
        for L in (2, 5, 9):
            assert_allclose(eta_pair_two_site_rdm(L, 0).data, np.diag([1, 0, 0, 0]), atol=1e-16)

    def test_one_site(self):
        assert_allclose(eta_pair_one_site_rdm(3, 1).data, np.diag([2 / 3, 1 / 3]), atol=1e-16)
        assert_allclose(eta_pair_one_site_rdm(2, 2).data, np.diag([0, 1]), atol=1e-16)

    def test_brute_force_all_small_chains(self):
        for L in range(2, 13):
            for N_d in range(L + 1):
                psi = dicke_state_vector(L, N_d)
                assert_allclose(reduced_state(psi, L, (0, 1)), eta_pair_two_site_rdm(L, N_d).data, atol=1e-12)
                assert_allclose(reduced_state(psi, L, (0,)), eta_pair_one_site_rdm(L, N_d).data, atol=1e-12)

    def test_permutation_invariance(self):
        L, N_d = 7, 3
        psi = dicke_state_vector(L, N_d)
        ref = reduced_state(psi, L, (0, 1))
        for sites in [(1, 4), (2, 6), (5, 3)]:
            assert_allclose(reduced_state(psi, L, sites), ref, atol=1e-12)
        for k in range(L):
            assert_allclose(reduced_state(psi, L, (k,)), reduced_state(psi, L, (0,)), atol=1e-12)

    def test_marginal_is_one_site(self):
        for L, N_d in [(3, 1), (10, 4), (57, 20)]:
            rho = eta_pair_two_site_rdm(L, N_d)
            assert_allclose(rho.partial_trace(0).data, eta_pair_one_site_rdm(L, N_d).data, atol=1e-12)

    def test_thermodynamic_limit(self):
        for n_d in (0.1, 0.25, 0.5):
            L = 500
            finite = eta_pair_two_site_rdm(L, round(n_d * L)).data
            tdl = two_site_rdm(TwoSiteParams.from_densities(0.0, n_d, 1)).data
            block = tdl[np.ix_([0, 2, 6, 8], [0, 2, 6, 8])]
            assert np.max(np.abs(finite - block)) < 1e-2

    def test_invalid(self):
        with pytest.raises(DomainError):
            eta_pair_two_site_rdm(1, 0)
        with pytest.raises(DomainError):
            eta_pair_two_site_rdm(4, 5)
        with pytest.raises(DomainError):
            eta_pair_two_site_rdm(4, -1)
