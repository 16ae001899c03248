import math

import numpy as np
import pytest
from conftest import random_state
from hypothesis import given, settings
from hypothesis import strategies as st

from brachistochrone_tangle.exceptions import InvalidInputError, StateParseError
from brachistochrone_tangle.settings import Tolerances
from brachistochrone_tangle.states import (
    PureState3Q,
    Qubit,
    SymmetricCoeffs,
    apply_local_unitaries,
    basis_state,
    embed_symmetric,
    format_state_text,
    ghz,
    inner_product,
    normalize,
    parse_state_text,
    permute_qubits,
    product_state,
    symmetric_inner_product,
    w,
    w_tilde,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
PAULI_X = np.array([[0, 1], [1, 0]])


def random_symmetric(g: np.random.Generator) -> SymmetricCoeffs:
    c = g.standard_normal(4) + 1j * g.standard_normal(4)
    return SymmetricCoeffs(c / np.linalg.norm(c))


def test_unnormalized_state_is_rejected():
    with pytest.raises(InvalidInputError):
        PureState3Q(np.ones(8))


def test_state_with_wrong_size_is_rejected():
    with pytest.raises(InvalidInputError):
        PureState3Q(np.array([1, 0, 0, 0]))


def test_state_amplitudes_are_read_only():
    s = ghz()

    with pytest.raises(ValueError):
        s.amp[0] = 1


def test_normalize_preserves_direction():
    values = np.arange(8) + 1j

    # act
    s = normalize(values)

    # assert
    assert s.norm() == pytest.approx(1, abs=1e-15)
    assert np.allclose(s.amp * np.linalg.norm(values), values, atol=1e-13)


def test_normalize_rejects_zero_vector():
    with pytest.raises(InvalidInputError):
        normalize(np.zeros(8))


def test_from_amplitudes_normalizes():
    s = PureState3Q.from_amplitudes([2, 0, 0, 0, 0, 0, 0, 0])

    assert np.array_equal(s.amp, basis_state("000").amp)


def test_inner_product_is_conjugate_linear_in_first_argument():
    a = basis_state("000")
    b = PureState3Q(1j * a.amp)

    assert inner_product(a, b) == pytest.approx(1j)
    assert inner_product(b, a) == pytest.approx(-1j)


def test_basis_state_index_order():
    assert basis_state("011").amp[3] == 1
    assert basis_state([1, 0, 0]).amp[4] == 1
    with pytest.raises(InvalidInputError):
        basis_state("0120")


def test_named_states():
    assert ghz().amp[0b000] == pytest.approx(1 / math.sqrt(2))
    assert ghz().amp[0b111] == pytest.approx(1 / math.sqrt(2))
    for index in (0b001, 0b010, 0b100):
        assert w().amp[index] == pytest.approx(1 / math.sqrt(3))
    for index in (0b110, 0b101, 0b011):
        assert w_tilde().amp[index] == pytest.approx(1 / math.sqrt(3))
    assert abs(inner_product(w(), w_tilde())) == 0


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_embed_symmetric_is_an_isometry(seed: int):
    g = np.random.default_rng(seed)
    a, b = random_symmetric(g), random_symmetric(g)

    # act
    full_a, full_b = embed_symmetric(a), embed_symmetric(b)

    # assert
    assert full_a.norm() == pytest.approx(1, abs=1e-12)
    assert abs(inner_product(full_a, full_b) - symmetric_inner_product(a, b)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=seeds, order=st.permutations([0, 1, 2]))
def test_embedded_states_are_permutation_symmetric(seed: int, order):
    s = embed_symmetric(random_symmetric(np.random.default_rng(seed)))

    assert np.allclose(permute_qubits(s, tuple(order)).amp, s.amp, atol=1e-15)


def test_permute_qubits_moves_amplitudes():
    s = basis_state("100")

    result = permute_qubits(s, (1, 0, 2))

    assert np.array_equal(result.amp, basis_state("010").amp)


def test_permute_qubits_rejects_invalid_permutation():
    with pytest.raises(InvalidInputError):
        permute_qubits(ghz(), (0, 0, 1))


def test_apply_local_unitaries_flips_first_qubit():
    result = apply_local_unitaries(basis_state("000"), PAULI_X, np.eye(2), np.eye(2))

    assert np.array_equal(result.amp, basis_state("100").amp)


def test_product_state_places_single_qubit_factor():
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)

    # act
    s = product_state(Qubit.B, [0, 1], bell)

    # assert
    expected = (basis_state("010").amp + basis_state("111").amp) / math.sqrt(2)
    assert np.allclose(s.amp, expected, atol=1e-15)


def test_parse_named_states():
    assert np.array_equal(parse_state_text("GHZ").amp, ghz().amp)
    assert np.array_equal(parse_state_text(" wtilde ").amp, w_tilde().amp)


def test_parse_state_text_normalizes():
    s = parse_state_text("2,0 0,0 0,0 0,0 0,0 0,0 0,0 0,2")

    assert np.allclose(s.amp, ghz().amp, atol=1e-15)


def test_parse_state_text_reverses_format(state_factory):
    s = state_factory()

    parsed = parse_state_text(format_state_text(s))

    assert np.allclose(parsed.amp, s.amp, atol=1e-15)


def test_parse_state_text_names_offending_token():
    with pytest.raises(StateParseError) as error:
        parse_state_text("1,0 0,0 0,0 x,0 0,0 0,0 0,0 0,0", field="initial")

    assert error.value.field == "initial[3]"


@pytest.mark.parametrize(
    "text",
    [
        "1,0 0,0",
        "bell",
        "0,0 0,0 0,0 0,0 0,0 0,0 0,0 0,0",
        "1 0 0 0 0 0 0 0",
    ],
)
def test_parse_state_text_rejects_invalid_input(text):
    with pytest.raises(StateParseError) as error:
        parse_state_text(text, field="final")

    assert error.value.field.startswith("final")
    assert isinstance(error.value, InvalidInputError)


def test_random_states_are_normalized(rng):
    for _ in range(10):
        assert random_state(rng).norm() == pytest.approx(1, abs=1e-12)


def test_normalize_superposition():
    s = normalize(basis_state("000").amp + basis_state("111").amp)

    assert np.allclose(s.amp, ghz().amp, atol=1e-15)


def test_embed_symmetric_basis_vectors():
    assert np.array_equal(embed_symmetric(SymmetricCoeffs([1, 0, 0, 0])).amp, basis_state("000").amp)
    assert np.allclose(embed_symmetric(SymmetricCoeffs([0, 0, 1, 0])).amp, w_tilde().amp, atol=1e-15)


def test_fiducial_vectors_have_the_prescribed_overlap():
    theta = 1.1
    a = SymmetricCoeffs([1, 0, 0, 0])
    b = SymmetricCoeffs([math.cos(theta / 2), math.sin(theta / 2), 0, 0])

    assert symmetric_inner_product(a, b) == pytest.approx(math.cos(theta / 2))
    assert inner_product(embed_symmetric(a), embed_symmetric(b)) == pytest.approx(math.cos(theta / 2))


def test_states_validate_with_the_given_tolerances():
    slightly_long = np.full(8, (1 + 1e-7) / math.sqrt(8))
    loose = Tolerances(normalization=1e-6)

    # act
    s = PureState3Q(slightly_long, loose)

    # assert
    assert s.tolerances is loose
    assert permute_qubits(s, (2, 1, 0)).tolerances is loose
    with pytest.raises(InvalidInputError):
        PureState3Q(slightly_long)
    with pytest.raises(InvalidInputError):
        SymmetricCoeffs(np.full(4, (1 + 1e-7) / 2))
    assert SymmetricCoeffs(np.full(4, (1 + 1e-7) / 2), loose).tolerances is loose
