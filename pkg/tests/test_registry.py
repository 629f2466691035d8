import math

import numpy as np
import pytest

from approxlab.registry import REGISTRY, RegistryError, make_function, parse_function, registry_names


def test_names():
    assert registry_names() == sorted(["const", "phat", "monomial", "exp", "abs", "sqrtabs",
                                       "tpow", "jacw", "cos"])


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_every_entry_evaluates(name):
    f = make_function(name)
    x = np.linspace(-0.99, 0.99, 7)
    y = f(x)
    assert y.shape == x.shape and np.all(np.isfinite(y))
    assert f.name == name


def test_values():
    x = np.array([-0.5, 0.25])
    assert np.allclose(make_function("abs:a=0.25,lam=2")(x), (x - 0.25) ** 2)
    assert np.allclose(make_function("tpow:lam=1.5")(x), [0.0, 0.25 ** 1.5])
    assert np.allclose(make_function("const:c=3")(x), 3)
    assert np.allclose(make_function("phat:k=1")(x), x)
    assert np.allclose(make_function("monomial:k=3")(x), x ** 3)
    assert np.allclose(make_function("jacw:beta=1")(x), 1 - x * x)
    assert np.allclose(make_function("cos:k=1")(x), np.cos(np.pi * x))


def test_labels_show_changed_parameters():
    assert make_function("abs:lam=1.5").name == "abs:lam=1.5"
    assert make_function("abs:lam=1").name == "abs"


def test_orders():
    fdef, params = parse_function("abs:lam=1.5")
    full = {**fdef.defaults, **params}
    assert fdef.order(full, 2) == pytest.approx(2.0)
    assert fdef.order(full, "inf") == pytest.approx(1.5)
    sq = REGISTRY["sqrtabs"]
    assert sq.order(sq.defaults, 1) == pytest.approx(1.5)
    assert REGISTRY["exp"].order({}, 2) is None


def test_space_membership():
    jw = REGISTRY["jacw"]
    assert jw.in_space({"beta": -0.5}, 2, 0.0) is False
    assert jw.in_space({"beta": -0.5}, 2, 0.5) is True
    assert jw.in_space({"beta": -0.5}, "inf", 0.5) is True
    assert REGISTRY["abs"].in_space(REGISTRY["abs"].defaults, math.inf, -0.1) is False


@pytest.mark.parametrize("spec,fragment", [
    ("nosuch", "registry:"), ("abs:lam", "malformed"), ("abs:lam=x", "needs a number"),
    ("abs:b=1", "unknown parameter"), ("exp:k=1", "unknown parameter"),
])
def test_parse_errors(spec, fragment):
    with pytest.raises(RegistryError) as info:
        make_function(spec)
    assert fragment in str(info.value)


def test_unknown_name_lists_registry():
    with pytest.raises(RegistryError) as info:
        make_function("nosuchfn")
    for name in registry_names():
        assert name in str(info.value)
    assert isinstance(info.value, KeyError)
