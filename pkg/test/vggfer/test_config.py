# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import pytest

from vggfer.config import env_to_bool, env_to_int
from vggfer.enum import EXPRESSIONS, PcaSolver, Scheme, TapPoint


@pytest.mark.parametrize('value, expected', [('1', True), ('Yes', True), (' on ', True), ('0', False), ('off', False)])
def test_env_to_bool(monkeypatch, value, expected):
    monkeypatch.setenv('VGGFER_TEST_FLAG', value)
    assert env_to_bool('VGGFER_TEST_FLAG', False) is expected


def test_env_to_bool_default(monkeypatch):
    monkeypatch.delenv('VGGFER_TEST_FLAG', raising=False)
    assert env_to_bool('VGGFER_TEST_FLAG', True) is True


def test_env_to_bool_invalid(monkeypatch):
    monkeypatch.setenv('VGGFER_TEST_FLAG', 'maybe')
    with pytest.raises(ValueError):
        env_to_bool('VGGFER_TEST_FLAG', False)


def test_env_to_int(monkeypatch):
    monkeypatch.setenv('VGGFER_TEST_INT', '128')
    assert env_to_int('VGGFER_TEST_INT', 1) == 128


def test_enum_values_and_case():
    assert TapPoint.BLOCK4_POOL.value == 'block4_pool'
    assert TapPoint.parse('BLOCK4_POOL') is TapPoint.BLOCK4_POOL
    assert Scheme.HOLDOUT_80_20 == 'holdout_80_20'
    assert str(PcaSolver.JACOBI) == 'jacobi'
    assert [t.depth for t in TapPoint] == list(range(6))


def test_enum_parse_rejects_unknown():
    with pytest.raises(ValueError, match='block1_pool'):
        TapPoint.parse('block6_pool')


def test_expressions():
    assert EXPRESSIONS == ('anger', 'disgust', 'fear', 'happy', 'neutral', 'sad', 'surprise')
