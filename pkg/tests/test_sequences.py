import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crseq import sequences as sq
from crseq.cr_model import CRParams, H_ZX_DEFAULT, calibrated_defaults, error_channels_of
from crseq.noise import NoiseRealization, OneQubitNoiseModel, freeze_realization
from crseq.pauli_core import (
    commutes,
    deviation,
    local_invariants,
    pauli_matrix,
    pauli_rotation,
    rot_z,
    trace_fidelity,
)

# closed-form block angle and frame angles, frozen to full precision
THETA0_REF = 0.8613842249350452
PSI_REF = 1.127130260240466
PHI_REF = -4.897706418728779


def random_params(rng, with_extras=True):
    h_zx = H_ZX_DEFAULT
    kw = dict(
        h_iz=h_zx * rng.uniform(-0.05, 0.05),
        h_zz=h_zx * rng.uniform(-0.15, 0.15),
        h_zx=h_zx,
    )
    if with_extras:
        kw.update(
            h_ix=h_zx * rng.uniform(-0.1, 0.1),
            h_zi=h_zx * rng.uniform(-0.1, 0.1),
            h_iy=h_zx * rng.uniform(-0.05, 0.05),
            h_zy=h_zx * rng.uniform(-0.05, 0.05),
        )
    return CRParams(**kw)


def test_closed_form_angles():
    assert sq.THETA0 == pytest.approx(THETA0_REF, abs=1e-15)
    assert sq.PSI == pytest.approx(PSI_REF, abs=1e-12)
    assert sq.PHI == pytest.approx(PHI_REF, abs=1e-12)
    # theta0 is a root of z^4 + z^3 - z^2 + z + 1 on the unit circle
    z = np.exp(1j * sq.THETA0)
    assert abs(z**4 + z**3 - z**2 + z + 1) < 1e-12


def test_length2_ideal_compilation_exact():
    p = CRParams(h_zx=H_ZX_DEFAULT)
    u = sq.compile_sequence(sq.length2(), p)
    assert np.max(np.abs(u - pauli_rotation("ZX", np.pi / 2))) < 1e-12


def test_length5_ideal_compilation_exact():
    p = CRParams(h_zx=H_ZX_DEFAULT)
    u = sq.compile_sequence(sq.length5(), p)
    assert np.max(np.abs(u - pauli_rotation("ZX", 5 * sq.THETA0))) < 1e-12


def test_length4_ideal_compilation():
    p = CRParams(h_zx=H_ZX_DEFAULT)
    seq = sq.length4()
    u = sq.compile_sequence(seq, p)
    assert deviation(seq.ideal_target, u) < 1e-12


def test_ecr_ideal_compilation():
    p = CRParams(h_zx=H_ZX_DEFAULT)
    u = sq.compile_sequence(sq.ecr(), p)
    assert deviation(pauli_rotation("ZX", np.pi / 2), u) < 1e-12


def test_ecr_equals_length2_for_any_couplings():
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(100):
        p = random_params(rng)
        u_ecr = sq.compile_sequence(sq.ecr(), p)
        u_l2 = sq.compile_sequence(sq.length2(), p)
        worst = max(worst, float(np.max(np.abs(u_ecr - u_l2))))
    assert worst < 1e-12


def test_nest_single_block_equals_length2():
    inner = sq.entangling_block(np.pi / 4)
    nested = sq.nest("XZ", inner)
    assert nested.elements == sq.length2().elements
    assert deviation(nested.ideal_target, sq.length2().ideal_target) < 1e-15


def test_nest_counts_blocks():
    nested = sq.nest("XZ", sq.length5())
    assert nested.n_blocks == 10


def test_echo_rejection():
    with pytest.raises(ValueError):
        sq.length2(echo="IZ")  # anticommutes with the entangler
    with pytest.raises(ValueError):
        sq.length2(echo="II")
    with pytest.raises(ValueError):
        sq.nest("ZY", sq.length5())


def test_sequence_bookkeeping():
    assert sq.length2().physical_1q_count == 2
    assert sq.ecr().physical_1q_count == 2
    assert sq.length5().physical_1q_count == 2
    assert sq.clifford_generator().physical_1q_count == 4
    assert sq.length2().total_entangling_time == pytest.approx(98.4e-9, rel=1e-12)
    t5 = sq.clifford_generator().total_entangling_time
    assert t5 == pytest.approx(10 * sq.THETA0 / H_ZX_DEFAULT, rel=1e-12)
    assert t5 == pytest.approx(540e-9, rel=0.01)


def test_clifford_generator_is_exact_clifford():
    seq = sq.clifford_generator()
    u = seq.ideal_target
    g1, g2 = local_invariants(u)
    assert abs(g1) < 1e-9 and abs(g2 - 1.0) < 1e-9
    # conjugation images frozen from an independent check
    images = {"XI": (1, "YX"), "ZI": (1, "ZI"), "IX": (1, "IX"), "IZ": (-1, "ZY")}
    for src, (sign, dst) in images.items():
        got = u @ pauli_matrix(src) @ u.conj().T
        assert np.max(np.abs(got - sign * pauli_matrix(dst))) < 1e-9, src


def test_clifford_generator_compiles_to_its_target():
    p = CRParams(h_zx=H_ZX_DEFAULT)
    seq = sq.clifford_generator()
    u = sq.compile_sequence(seq, p)
    assert deviation(seq.ideal_target, u) < 1e-12


def test_clifford_generator_axis_validation():
    with pytest.raises(ValueError):
        sq.clifford_generator("IX")  # commutes with the entangler
    with pytest.raises(ValueError):
        sq.clifford_generator("ZZ")  # not single-qubit
    # IY is a valid anticommuting single-qubit axis, X-realized rotations
    seq = sq.clifford_generator("IY")
    g1, g2 = local_invariants(seq.ideal_target)
    assert abs(g1) < 1e-9 and abs(g2 - 1.0) < 1e-9


def test_robustness_pattern_length5():
    pat = sq.sequence_pattern(sq.length5(), "IY")
    assert pat.zeta == (1, 1, -1, 1, 1)
    assert pat.xi == (1, 1, 1, 1, 1)
    assert pat.chi == -1
    assert sq.robustness_residual(pat) < 1e-12


def test_robustness_pattern_length2():
    # channels commuting with the entangler and anticommuting with the echo cancel
    pat = sq.sequence_pattern(sq.length2(), "IX")
    assert pat.zeta == (1, -1) and pat.chi == 1
    assert sq.robustness_residual(pat) == pytest.approx(0.0, abs=1e-15)
    # anticommuting channels survive at n=2
    pat_iy = sq.sequence_pattern(sq.length2(), "IY")
    assert sq.robustness_residual(pat_iy) == pytest.approx(
        2 * abs(np.sin(np.pi / 8)), abs=1e-12
    )


def test_robustness_even_n_commuting_cancellation_any_theta():
    rng = np.random.default_rng(5)
    for theta in rng.uniform(0.05, np.pi, size=10):
        pat = sq.sequence_pattern(sq.length2(theta=theta), "IX")
        assert sq.robustness_residual(pat) < 1e-14


def test_length4_cancels_its_six_channels():
    canceled = {"IX", "ZI", "XY", "XZ", "YY", "YZ"}
    for ch in canceled:
        pat = sq.sequence_pattern(sq.length4(), ch)
        assert sq.robustness_residual(pat) < 1e-13, ch
    pat_zx = sq.sequence_pattern(sq.length4(), "ZX")
    assert sq.robustness_residual(pat_zx) > 1.0


def test_first_order_cancellation_slope_length5():
    # residual error of an anticommuting coupling scales quadratically at theta0
    h = H_ZX_DEFAULT
    seq = sq.length5()
    mags = []
    scales = np.array([1e-3, 1e-4])
    for s in scales:
        p = CRParams(h_iz=s * h, h_zz=-0.7 * s * h, h_zx=h)
        u = sq.compile_sequence(seq, p)
        ch = error_channels_of(u, seq.ideal_target)
        mags.append(max(abs(c) for c in ch.coefficients.values()))
    slope = np.log(mags[0] / mags[1]) / np.log(scales[0] / scales[1])
    assert slope == pytest.approx(2.0, abs=0.05)


def test_length4_cancels_commuting_couplings_exactly():
    # IX and ZI commute with the drive term, so their toggled sum vanishes
    # identically, not just at first order
    h = H_ZX_DEFAULT
    p = CRParams(h_ix=0.05 * h, h_zi=0.08 * h, h_zx=h)
    seq = sq.length4()
    assert deviation(seq.ideal_target, sq.compile_sequence(seq, p)) < 1e-12


def test_length2_cancels_ix_exactly():
    h = H_ZX_DEFAULT
    p = CRParams(h_ix=0.06 * h, h_zx=h)
    seq = sq.length2()
    assert deviation(seq.ideal_target, sq.compile_sequence(seq, p)) < 1e-12


def test_echo_search_examples():
    hits = sq.echo_search({"IX"})
    assert "XZ" in hits
    assert set(hits) == {"XY", "XZ", "YY", "YZ"}
    all_commuting = sq.echo_search(set())
    assert len(all_commuting) == 7
    assert sq.echo_search(set(all_commuting)) == []


def test_su2_embedding_triples():
    for entangler in ("ZX", "ZZ", "XY", "YY"):
        triples = sq.su2_embedding(entangler)
        for key in ("plus", "minus"):
            x, y, z = triples[key]["x"], triples[key]["y"], triples[key]["z"]
            assert np.max(np.abs(x @ y - y @ x - 2j * z)) < 1e-13, entangler
            assert np.max(np.abs(y @ z - z @ y - 2j * x)) < 1e-13, entangler
            assert np.max(np.abs(z @ x - x @ z - 2j * y)) < 1e-13, entangler
        for ax1 in "xyz":
            for ax2 in "xyz":
                a, b = triples["plus"][ax1], triples["minus"][ax2]
                assert np.max(np.abs(a @ b - b @ a)) < 1e-13, (entangler, ax1, ax2)


def test_su2_embedding_rejects_single_qubit_axis():
    with pytest.raises(ValueError):
        sq.su2_embedding("ZI")


def test_pattern_extraction_validation():
    with pytest.raises(ValueError):
        sq.sequence_pattern(sq.ecr(), "IY")  # reversed drive unsupported
    with pytest.raises(ValueError):
        sq.sequence_pattern(sq.length5(), "II")
    with pytest.raises(ValueError):
        sq.sequence_pattern(sq.clifford_generator(), "IY")  # has frame rotations


def test_noise_dressing_enters_compilation():
    p = calibrated_defaults()
    model = OneQubitNoiseModel(0.05)
    rng = np.random.default_rng(77)
    noise = freeze_realization(model, rng)
    u_clean = sq.compile_sequence(sq.length2(), p)
    u_noisy = sq.compile_sequence(sq.length2(), p, noise)
    assert trace_fidelity(u_clean, u_noisy) < 1.0 - 1e-6
    # zero-width noise is the identity dressing
    empty = freeze_realization(OneQubitNoiseModel(0.0), rng)
    assert np.allclose(sq.compile_sequence(sq.length2(), p, empty), u_clean)


def test_echo_y_factor_is_frame_rotated_x():
    model = OneQubitNoiseModel(0.08)
    noise = freeze_realization(model, np.random.default_rng(3))
    p = calibrated_defaults()
    got = sq.element_unitary(sq.Echo("XY"), p, noise)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    m1 = noise.gate(1, "x180") @ x
    m2 = rot_z(np.pi / 2) @ (noise.gate(2, "x180") @ x) @ rot_z(-np.pi / 2)
    assert np.max(np.abs(got - np.kron(m1, m2))) < 1e-13


def test_serialization_roundtrip():
    for seq in (sq.length2(), sq.ecr(), sq.length5(), sq.clifford_generator(), sq.length4()):
        text = sq.to_text(seq)
        back = sq.from_text(text, name=seq.name)
        assert back.elements == seq.elements
        assert deviation(back.ideal_target, seq.ideal_target) < 1e-12


def test_from_text_rejects_malformed_lines():
    with pytest.raises(ValueError):
        sq.from_text("entangle theta_pi=0.25 drive\n")
    with pytest.raises(ValueError):
        sq.from_text("wiggle qubit=1\n")


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["IX", "ZI", "ZX", "XY", "XZ", "YY", "YZ"]), st.floats(0.05, 3.0))
def test_length2_pattern_residual_closed_form(echo_partner, theta):
    # for chi=+1 channels the residual is |1 + sign| with the echo frame sign
    pat = sq.sequence_pattern(sq.length2(theta=theta), echo_partner)
    expected = abs(1 + (1 if commutes("XZ", echo_partner) else -1))
    if pat.chi == 1:
        assert sq.robustness_residual(pat) == pytest.approx(expected, abs=1e-12)
