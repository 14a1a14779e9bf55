import pytest

from cohconc.errors import DimensionError, ParameterError
from cohconc.io import dumps, load_state, save_state, state_from_dict, state_to_dict
from cohconc.states import BipartitePureState, random_bipartite, random_mixed, random_pure


@pytest.mark.parametrize("state", [random_pure(3, 1), random_mixed(4, 2, 2), random_bipartite(2, 2, 3)])
def test_round_trip_is_exact(state, tmp_path):
    path = tmp_path / "s.json"
    save_state(state, path)
    back = load_state(path)
    assert type(back) is type(state)
    assert state_to_dict(back) == state_to_dict(state)


def test_bipartite_keeps_dims():
    assert isinstance(state_from_dict(state_to_dict(random_bipartite(3, 3, 1))), BipartitePureState)


def test_bad_inputs(tmp_path):
    with pytest.raises(DimensionError):
        state_from_dict({"dim": 3, "kind": "pure", "data": [[1, 0], [0, 0]]})
    with pytest.raises(ParameterError):
        state_from_dict({"dim": 2, "kind": "weird", "data": [[1, 0], [0, 0]]})
    with pytest.raises(ParameterError):
        state_from_dict({"kind": "pure"})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ParameterError):
        load_state(bad)
    with pytest.raises(ParameterError):
        load_state(tmp_path / "missing.json")


def test_dumps_refuses_nan():
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})
    assert dumps({"x": 0.1}) == '{"x": 0.1}'
