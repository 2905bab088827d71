import json

import numpy as np
import pytest

import certground as cg
from certground.models import (PatchSpec, build_patch, build_ring, builtin_model,
                               embed_on_sites, operator_norm, parse_model,
                               patch_bonds)
from tests.conftest import CHAIN, RING


class TestBuiltins:
    def test_xxz_delta_one_is_heisenberg(self):
        hm = builtin_model("heisenberg")
        xxz = builtin_model("xxz", [1.0])
        np.testing.assert_allclose(xxz.term, hm.term, atol=1e-14)

    def test_random_twosite_deterministic(self):
        a = builtin_model("random_twosite", [7.0])
        b = builtin_model("random_twosite", [7.0])
        np.testing.assert_array_equal(a.term, b.term)

    def test_random_twosite_hermitian_complex(self):
        m = builtin_model("random_twosite", [7.0])
        term = np.asarray(m.term)
        np.testing.assert_allclose(term, term.conj().T, atol=1e-12)
        assert not m.is_real

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            builtin_model("nope")


class TestParseModel:
    def test_pauli_sum_matches_builtin(self):
        doc = json.dumps({"name": "h", "d": 2, "D": 1, "term": {"pauli_sum": [
            {"paulis": "XX", "coeff": 0.5}, {"paulis": "YY", "coeff": 0.5},
            {"paulis": "ZZ", "coeff": 0.5}]}})
        np.testing.assert_allclose(parse_model(doc).term,
                                   builtin_model("heisenberg").term, atol=1e-14)

    def test_dense_diagonal(self):
        entries = [[0.0, 0.0]] * 16
        entries[0] = [1.0, 0.0]
        entries[15] = [1.0, 0.0]
        doc = json.dumps({"name": "zzlike", "d": 2, "D": 1,
                          "term": {"dense": entries}})
        m = parse_model(doc)
        np.testing.assert_allclose(np.asarray(m.term).real,
                                   np.diag([1.0, 0.0, 0.0, 1.0]), atol=1e-14)

    def test_non_hermitian_rejected(self):
        entries = [[0.0, 0.0]] * 16
        entries[1] = [1.0, 0.0]  # upper off-diagonal only
        doc = json.dumps({"name": "bad", "d": 2, "D": 1,
                          "term": {"dense": entries}})
        with pytest.raises(ValueError):
            parse_model(doc)

    def test_missing_field(self):
        with pytest.raises(ValueError):
            parse_model(json.dumps({"name": "x", "d": 2, "D": 1}))

    def test_invalid_json(self):
        with pytest.raises(ValueError):
            parse_model("{not json")


class TestPatch:
    def test_m2_spectrum(self, heisenberg):
        h = build_patch(heisenberg, PatchSpec(2)).toarray()
        assert h.shape == (4, 4)
        assert abs(np.linalg.eigvalsh(h)[0] - CHAIN[2]) < 1e-12

    def test_m3_lambda_min(self, heisenberg):
        h = build_patch(heisenberg, PatchSpec(3)).toarray()
        assert abs(np.linalg.eigvalsh(h)[0] - CHAIN[3]) < 1e-12

    def test_bond_counts(self):
        assert len(patch_bonds(PatchSpec(2))) == 1
        assert len(patch_bonds(PatchSpec(5))) == 4
        # open m x m grid: 2 m (m - 1) bonds
        assert len(patch_bonds(PatchSpec(3, 2))) == 12

    def test_ring_density(self, heisenberg):
        for n in (2, 3, 4, 6):
            h = build_ring(heisenberg, n).toarray()
            assert abs(np.linalg.eigvalsh(h)[0] / n - RING[n]) < 1e-10

    def test_cap_enforced(self, heisenberg, monkeypatch):
        monkeypatch.setenv("CERTGROUND_MAX_QUBITS", "4")
        with pytest.raises(ValueError):
            build_patch(heisenberg, PatchSpec(5))


class TestOperatorNorm:
    def test_heisenberg(self, heisenberg):
        assert abs(operator_norm(heisenberg) - 1.5) < 1e-12

    def test_zero(self, zero_model):
        assert operator_norm(zero_model) == 0.0

    def test_homogeneity(self, heisenberg):
        import dataclasses
        scaled = dataclasses.replace(heisenberg, term=3.0 * np.asarray(heisenberg.term))
        assert abs(operator_norm(scaled) - 3.0 * operator_norm(heisenberg)) < 1e-10


class TestEmbed:
    def test_single_site(self):
        z = np.diag([1.0, -1.0])
        e = embed_on_sites(z, (0,), 2).toarray()
        np.testing.assert_allclose(e, np.kron(z, np.eye(2)), atol=1e-14)

    def test_swapped_positions(self, heisenberg):
        h = np.asarray(heisenberg.term)
        swap = np.eye(4)[[0, 2, 1, 3]]
        a = embed_on_sites(h, (0, 1), 2).toarray()
        b = embed_on_sites(h, (1, 0), 2).toarray()
        np.testing.assert_allclose(b, swap @ a @ swap, atol=1e-13)

    def test_trace_identity(self):
        rng = np.random.default_rng(0)
        b = rng.standard_normal((4, 4))
        h = (b + b.T) / 2
        e = embed_on_sites(h, (1, 3), 5)
        assert abs(e.diagonal().sum() - np.trace(h) * 2 ** 3) < 1e-10
