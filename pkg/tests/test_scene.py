import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netmoment import (Dipole, DipoleScene, SceneError, algebraic_moment,
                       height_moment, net_moment, scene_from_dict, scene_to_dict)

# dyadic floats keep every arithmetic identity exact
dyadic = st.integers(min_value=-64, max_value=64).map(lambda n: n / 16.0)


def make_scene(rows, height=8.0, units="natural"):
    return DipoleScene(tuple(Dipole(p, m) for p, m in rows), height, units)


def test_net_moment_demo_scene(demo_scene):
    m = net_moment(demo_scene)
    assert m.as_array() == pytest.approx([3.0e-12, 12.0e-12, 5.5e-12], rel=1e-14)


def test_net_moment_empty_scene():
    scene = DipoleScene((), 1.0, "natural")
    assert net_moment(scene).as_array().tolist() == [0.0, 0.0, 0.0]


def test_net_moment_single_dipole_identity():
    scene = make_scene([((0.5, -1.0, 2.0), (1.25, -0.5, 3.0))])
    assert net_moment(scene).as_array().tolist() == [1.25, -0.5, 3.0]


def test_algebraic_moment_zeroth_equals_net(demo_scene):
    m = net_moment(demo_scene)
    for n in (1, 2, 3):
        assert algebraic_moment(demo_scene, 0, 0, 0, n) == m[n - 1]


def test_algebraic_moment_point_sum():
    scene = make_scene([((1.0, 2.0, 3.0), (0.0, 0.0, 5.0))], height=10.0)
    assert algebraic_moment(scene, 1, 0, 1, 3) == 15.0


def test_algebraic_moment_demo_x1_m3(demo_scene):
    # hand sum over the four dipoles: 3.5*1 + 0*0.5 + 4*2.5 - 4*1.5 (x 1e-17)
    expected = (3.5 * 1.0 + 0.0 * 0.5 + 4.0 * 2.5 - 4.0 * 1.5) * 1e-17
    assert algebraic_moment(demo_scene, 1, 0, 0, 3) == pytest.approx(expected, rel=1e-13)


def test_algebraic_moment_bad_component(demo_scene):
    with pytest.raises(SceneError):
        algebraic_moment(demo_scene, 0, 0, 0, 4)


@given(st.lists(st.tuples(st.tuples(dyadic, dyadic, dyadic),
                          st.tuples(dyadic, dyadic, dyadic)), max_size=4),
       st.lists(st.tuples(st.tuples(dyadic, dyadic, dyadic),
                          st.tuples(dyadic, dyadic, dyadic)), max_size=4),
       st.integers(0, 3), st.integers(0, 3), st.integers(0, 2), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_moment_linearity_under_concatenation(rows_a, rows_b, j1, j2, j3, n):
    a = make_scene(rows_a)
    b = make_scene(rows_b)
    both = make_scene(rows_a + rows_b)
    assert (algebraic_moment(both, j1, j2, j3, n)
            == algebraic_moment(a, j1, j2, j3, n) + algebraic_moment(b, j1, j2, j3, n))


@given(st.lists(st.tuples(st.tuples(dyadic, dyadic, dyadic),
                          st.tuples(dyadic, dyadic, dyadic)), min_size=1, max_size=4),
       dyadic, st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_translation_shifts_first_moment(rows, delta, n):
    base = make_scene(rows)
    shifted = make_scene([((p[0] + delta, p[1], p[2]), m) for p, m in rows])
    m_n = net_moment(base)[n - 1]
    assert (algebraic_moment(shifted, 1, 0, 0, n)
            == algebraic_moment(base, 1, 0, 0, n) + delta * m_n)


def test_height_moment_matches_direct_sum(demo_scene):
    h = demo_scene.height
    for (p, q, r, n) in ((1, 0, 0, 1), (2, 1, 0, 3), (3, 0, 2, 2), (0, 2, 1, 1)):
        direct = sum((h - pos[2]) ** p * pos[0] ** q * pos[1] ** r * mom[n - 1]
                     for pos, mom in zip(demo_scene.positions, demo_scene.moments))
        assert height_moment(demo_scene, p, q, r, n) == pytest.approx(direct, rel=1e-12)


def test_height_above_dipoles_enforced():
    with pytest.raises(SceneError, match="height"):
        make_scene([((0.0, 0.0, 2.0), (1.0, 0.0, 0.0))], height=2.0)


def test_non_finite_rejected():
    with pytest.raises(SceneError):
        Dipole((0.0, 0.0, math.nan), (1.0, 0.0, 0.0))
    with pytest.raises(SceneError):
        Dipole((0.0, 0.0, 0.0), (math.inf, 0.0, 0.0))


def test_bad_unit_system():
    with pytest.raises(SceneError, match="unit_system"):
        DipoleScene((), 1.0, "imperial")


def test_scene_json_round_trip(demo_scene):
    rebuilt = scene_from_dict(scene_to_dict(demo_scene))
    assert rebuilt == demo_scene


def test_scene_from_dict_names_offending_field():
    with pytest.raises(SceneError, match="height"):
        scene_from_dict({"unit_system": "si", "height": "tall", "dipoles": []})
    with pytest.raises(SceneError, match="dipoles\\[0\\]"):
        scene_from_dict({"unit_system": "si", "height": 1.0, "dipoles": [{"position": [0, 0, 0]}]})


def test_mu0_by_unit_system(demo_scene, demo_scene_natural):
    assert demo_scene.mu0 == pytest.approx(4e-7 * np.pi)
    assert demo_scene_natural.mu0 == 1.0
