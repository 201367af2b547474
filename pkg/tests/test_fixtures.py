"""The bundled networks: builders, JSON copies, and their stated properties."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from tinopt.fixtures import (
    acyclic4,
    builtin_networks,
    caution_lp,
    cyclic_dominant4,
    example1,
    example2,
    fixture_json,
    gap_network,
    gap_point,
    load_bundled,
)
from tinopt.model import InputError, check_tin, network_to_dict, parse_network
from tinopt.optimize import solve_lp
from tinopt.report import dumps_canonical

REPO_FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_bundled_json_matches_builders_byte_for_byte():
    for name, builder in builtin_networks().items():
        expected = dumps_canonical(network_to_dict(builder()))
        assert fixture_json(name) == expected, name


def test_repo_fixture_copies_equal_bundled_data():
    for name in builtin_networks():
        path = REPO_FIXTURES / (name + ".json")
        assert path.is_file(), path
        assert path.read_text() == fixture_json(name)


def test_load_bundled_equals_builder():
    for name, builder in builtin_networks().items():
        assert load_bundled(name) == builder()
    with pytest.raises(InputError):
        load_bundled("does-not-exist")


def test_fixture_json_is_valid_canonical_json():
    for name in builtin_networks():
        text = fixture_json(name)
        assert dumps_canonical(json.loads(text)) == text
        parse_network(json.loads(text))  # must be a loadable network


def test_example_fixtures_share_their_first_two_subchannels():
    a, b = example1(), example2()
    assert a.matrices[:2] == b.matrices[:2]
    assert a.matrices[2] != b.matrices[2]
    for mat in a.matrices + b.matrices:
        assert check_tin(mat).satisfied


def test_gap_network_parameter_validation():
    gap_network(Fraction(1, 8))
    gap_network("1/5")
    for bad in (0, Fraction(1, 4), Fraction(-1, 10), 1):
        with pytest.raises(InputError):
            gap_network(bad)


def test_gap_network_structure():
    eps = Fraction(1, 10)
    net = gap_network(eps)
    assert net.mode == "gdof" and net.users == 3 and net.subchannels == 2
    weak = Fraction(1, 2) - eps
    assert net.matrices[1].entry(1, 3) == weak
    assert net.matrices[0].entry(1, 3) == 0
    for mat in net.matrices:
        assert check_tin(mat).satisfied
    assert gap_point() == (2, Fraction(1, 2), Fraction(1, 2))


def test_default_gap_epsilon_matches_bundled_fixture():
    assert gap_network() == load_bundled("gap_eps_1_10")


def test_caution_lp_shape_and_optima():
    lp = caution_lp()
    assert len(lp.objective) == 3 and len(lp.constraints) == 3
    assert all(lp.nonneg)
    assert not any(caution_lp(nonneg=False).nonneg)
    assert solve_lp(caution_lp(True)).value == 20
    assert solve_lp(caution_lp(False)).value == 25


def test_four_user_fixtures_are_tin_optimal():
    for net in (acyclic4(), cyclic_dominant4()):
        assert net.users == 4 and net.subchannels == 1
        assert check_tin(net.matrices[0]).satisfied
