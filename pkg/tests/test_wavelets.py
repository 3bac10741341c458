import json

import numpy as np
import pytest

from lff.errors import ValidationError
from lff.field import FieldParams
from lff.funcspace import SystemElementIndex, inner_product, integral, norm, system_element
from lff.wavelets import generator_io, haar_generators, load_generators, perturbed_haar, save_generators


def test_haar_q2(q2):
    (psi,) = haar_generators(q2)
    assert (psi.M, psi.N) == (0, 1)
    assert np.array_equal(psi.values, [1, -1])


def test_haar_q3(q3):
    w = np.exp(2j * np.pi / 3)
    a, b = haar_generators(q3)
    assert np.allclose(a.values, [1, w, w**2], atol=1e-15)
    assert np.allclose(b.values, [1, w**2, w], atol=1e-15)


@pytest.mark.parametrize("pc", [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3)])
def test_haar_unit_mean_zero(pc):
    gens = haar_generators(FieldParams(*pc))
    assert len(gens) == FieldParams(*pc).q - 1
    for g in gens:
        assert abs(norm(g) - 1) < 1e-15
        assert abs(integral(g)) < 1e-15


def test_within_scale_orthonormal(params):
    H = haar_generators(params)
    q = params.q
    els = [(l, k, system_element(H, SystemElementIndex(l, 0, k))) for l in range(1, q) for k in range(q * q)]
    for l, k, a in els:
        for l2, k2, b in els:
            want = 1.0 if (l, k) == (l2, k2) else 0.0
            assert abs(inner_product(a, b) - want) < 1e-12


@pytest.mark.parametrize("j", [1, 2])
def test_cross_scale_orthogonal(params, j):
    H = haar_generators(params)
    for l in range(1, params.q):
        for l2 in range(1, params.q):
            for k in range(params.q ** (j + 1)):
                assert abs(inner_product(H[l - 1], system_element(H, SystemElementIndex(l2, j, k)))) < 1e-12


def test_perturbed_q2(q2):
    (g,) = perturbed_haar(q2)
    assert np.allclose(g.values / g.values[0], [1, 0.8, -0.8, -1], atol=1e-15)
    assert abs(norm(g) - 1) < 1e-15


def test_perturbed_mean_zero(params):
    for g in perturbed_haar(params):
        assert abs(integral(g)) < 1e-15


class TestIO:
    def test_round_trip(self, tmp_path, params):
        gens = perturbed_haar(params) + haar_generators(params)
        path = tmp_path / "g.lfgen.json"
        save_generators(path, gens)
        back = load_generators(path)
        assert len(back) == len(gens)
        for a, b in zip(gens, back):
            assert a.params == b.params and (a.M, a.N) == (b.M, b.N)
            assert np.array_equal(a.values, b.values)
        save_generators(tmp_path / "again.lfgen.json", back)
        assert (tmp_path / "again.lfgen.json").read_text() == path.read_text()

    def test_generator_io(self, tmp_path, q2):
        path = tmp_path / "h.lfgen.json"
        generator_io(path, "save", haar_generators(q2))
        assert np.array_equal(generator_io(path, "load")[0].values, [1, -1])

    def _write(self, tmp_path, doc):
        path = tmp_path / "bad.lfgen.json"
        path.write_text(json.dumps(doc))
        return path

    def test_value_count(self, tmp_path):
        doc = {"field": {"p": 2, "c": 1, "modulus": [0, 1]}, "generators": [{"M": 0, "N": 1, "values": [1, 0, -1]}]}
        with pytest.raises(ValidationError) as err:
            load_generators(self._write(tmp_path, doc))
        assert err.value.field == "generators[0].values"

    def test_reducible_modulus(self, tmp_path):
        doc = {"field": {"p": 2, "c": 2, "modulus": [1, 0, 1]}, "generators": [{"M": 0, "N": 1, "values": [1, -1, 0, 0]}]}
        with pytest.raises(ValidationError) as err:
            load_generators(self._write(tmp_path, doc))
        assert err.value.field == "field.modulus"

    @pytest.mark.parametrize(
        "doc,field",
        [
            ({"generators": []}, "field"),
            ({"field": {"p": 2, "c": 1}}, "generators"),
            ({"field": {"p": 2}, "generators": [{}]}, "field.c"),
            ({"field": {"p": 2, "c": 1}, "generators": [{"N": 1, "values": [1, -1]}]}, "generators[0].M"),
            ({"field": {"p": 2, "c": 1}, "generators": [{"M": 0, "N": 1, "values": [1, "x"]}]}, "generators[0].values[1]"),
            ({"field": {"p": 4, "c": 1}, "generators": [{"M": 0, "N": 0, "values": [1]}]}, "field.p"),
        ],
    )
    def test_schema_errors_name_field(self, tmp_path, doc, field):
        with pytest.raises(ValidationError) as err:
            load_generators(self._write(tmp_path, doc))
        assert err.value.field == field

    def test_mixed_fields_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            save_generators(tmp_path / "x.lfgen.json", haar_generators(FieldParams(2, 1)) + haar_generators(FieldParams(3, 1)))
        assert not (tmp_path / "x.lfgen.json").exists()
