import numpy as np
import pytest

from qtomo.errors import ParameterOutOfRange, UnknownLabel, ValidationError
from qtomo.metrics import concurrence_unclamped
from qtomo.qcore import hermitian_eigenvalues, projector, validate_density
from qtomo.states import (
    PHI_MINUS, PSI_MINUS, StateSpec, bell_diagonal, named_pure, random_density,
    random_pure_density, werner,
)

S = 1 / np.sqrt(2)


def test_named_L():
    assert np.allclose(named_pure("L"), [S, 1j * S])


def test_named_psi_minus():
    assert np.allclose(named_pure("psi_minus"), np.array([1, 0, 0, -1]) * S)
    assert np.allclose(named_pure("phi_minus"), np.array([0, 1, -1, 0]) * S)


def test_named_plus_minus():
    assert np.allclose(named_pure("+-"), 0.5 * np.array([1, -1, 1, -1]))
    assert np.allclose(named_pure("+−"), 0.5 * np.array([1, -1, 1, -1]))


def test_named_single_letters():
    expect = {"0": [1, 0], "1": [0, 1], "+": [S, S], "-": [S, -S], "L": [S, 1j * S], "R": [S, -1j * S]}
    for lab, vec in expect.items():
        assert np.allclose(named_pure(lab), vec)


def test_named_unknown():
    with pytest.raises(UnknownLabel):
        named_pure("X")
    with pytest.raises(UnknownLabel):
        named_pure("01", 3)
    with pytest.raises(UnknownLabel):
        named_pure("psi_minus", 1)


def test_bell_diagonal_b1():
    assert np.allclose(np.asarray(bell_diagonal(1.0)), projector(PSI_MINUS))


def test_bell_diagonal_concurrence():
    assert concurrence_unclamped(bell_diagonal(0.8)) == pytest.approx(0.6, abs=1e-9)
    assert concurrence_unclamped(bell_diagonal(0.5)) == pytest.approx(0.0, abs=1e-9)


def test_werner_examples():
    assert np.allclose(np.asarray(werner(0.0)), np.eye(4) / 4)
    assert concurrence_unclamped(werner(0.25)) == pytest.approx(-0.125, abs=1e-9)
    assert concurrence_unclamped(werner(0.5)) == pytest.approx(0.25, abs=1e-9)


@pytest.mark.parametrize("bad", [-0.01, 1.01, float("nan")])
def test_parameter_range(bad):
    with pytest.raises(ParameterOutOfRange):
        bell_diagonal(bad)
    with pytest.raises(ParameterOutOfRange):
        werner(bad)


@pytest.mark.parametrize("x", np.round(np.linspace(0, 1, 11), 10))
def test_closed_forms(x):
    assert concurrence_unclamped(bell_diagonal(x)) == pytest.approx(abs(2 * x - 1), abs=1e-9)
    assert concurrence_unclamped(werner(x)) == pytest.approx((3 * x - 1) / 2, abs=1e-9)


@pytest.mark.parametrize("x", [0.0, 0.3, 0.8, 1.0])
def test_spectra_and_rank(x):
    wb = hermitian_eigenvalues(bell_diagonal(x))
    assert np.all((wb >= -1e-12) & (wb <= 1 + 1e-12))
    assert np.sum(wb > 1e-12) <= 2
    ww = hermitian_eigenvalues(werner(x))
    assert np.all((ww >= -1e-12) & (ww <= 1 + 1e-12))
    if x < 1:
        assert np.sum(ww > 1e-12) == 4


def test_random_density_deterministic():
    a = random_density(2, np.random.default_rng(5))
    b = random_density(2, np.random.default_rng(5))
    assert np.array_equal(a.matrix, b.matrix)


def test_random_density_mean_is_maximally_mixed():
    r = np.random.default_rng(11)
    acc = np.zeros((2, 2), dtype=complex)
    for _ in range(10_000):
        acc += random_density(1, r).matrix
    assert np.allclose(acc / 10_000, np.eye(2) / 2, atol=0.02)


def test_random_density_valid(rng):
    for n in (1, 2):
        for _ in range(200):
            validate_density(random_density(n, rng).matrix, 1e-9)


def test_random_density_full_rank(rng):
    assert np.all(hermitian_eigenvalues(random_density(2, rng)) > 0)


def test_random_pure_density(rng):
    rho = random_pure_density(2, rng)
    assert np.trace(rho.matrix @ rho.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_state_spec_validation():
    with pytest.raises(ValidationError):
        StateSpec("werner")
    with pytest.raises(ValidationError):
        StateSpec("werner", 0.5, n_qubits=1)
    with pytest.raises(ValidationError):
        StateSpec("bell_diagonal", 1.5)
    with pytest.raises(ValidationError):
        StateSpec("pure_named")
    with pytest.raises(ValidationError):
        StateSpec("random", n_qubits=3)
    with pytest.raises(ValidationError):
        StateSpec("nonsense")


def test_state_spec_build(rng):
    assert np.allclose(StateSpec("werner", 0.25).build().matrix, werner(0.25).matrix)
    assert np.allclose(StateSpec("pure_named", label="01").build().matrix, projector(named_pure("01")))
    assert StateSpec("random", n_qubits=1).build(rng).dim == 2
    with pytest.raises(ValidationError):
        StateSpec("random").build()


def test_state_spec_roundtrip():
    for spec in (StateSpec("werner", 0.5), StateSpec("random", n_qubits=1, pure_only=True),
                 StateSpec("pure_named", label="+L")):
        assert StateSpec(**spec.to_dict()) == spec


def test_phi_minus_orthogonal():
    assert abs(np.vdot(PSI_MINUS, PHI_MINUS)) < 1e-15
