import math

import numpy as np
import pytest

from jqpie.imagio import GrayscaleImage, pad_and_partition, pad_to_pow2
from jqpie.jpegcore import (QuantTable, idct2_block, reference_decode_pixels,
                            truncate_zigzag, zigzag_coefficients)
from jqpie.pipeline import (NormalizationRecord, readout_image, run_jqpie,
                            run_qf_jqpie, run_qpie_direct)
from jqpie.qsim import StateVector, apply_circuit, from_amplitudes, state_fidelity
from jqpie.synth import block_encoded_rescaler, synth_truncated_zigzag, truncated_zigzag_map

from conftest import gradient_image, random_image


# --- direct amplitude encoding -------------------------------------------------

def test_qpie_two_by_two_amplitudes():
    img = GrayscaleImage(np.array([[3.0, 0.0], [0.0, 4.0]]))
    result = run_qpie_direct(img)
    assert np.allclose(result.reconstructed.pixels, img.pixels, atol=1e-12)
    assert np.allclose(result.state.amplitudes.real, [0.6, 0.0, 0.0, 0.8], atol=1e-15)
    assert result.success_probability == 1.0


def test_qpie_uniform_image_gives_uniform_superposition(rng):
    img = GrayscaleImage(np.full((8, 8), 37.0))
    result = run_qpie_direct(img)
    assert np.allclose(np.abs(result.state.amplitudes), 1 / 8, atol=1e-12)


def test_qpie_readout_roundtrip(rng):
    img = random_image(rng, 16, 16)
    result = run_qpie_direct(img)
    assert np.max(np.abs(result.reconstructed.pixels - img.pixels)) <= 1e-9


def test_qpie_rejects_non_pow2_and_zero():
    with pytest.raises(ValueError):
        run_qpie_direct(GrayscaleImage(np.ones((12, 16))))
    with pytest.raises(ValueError):
        run_qpie_direct(GrayscaleImage(np.zeros((8, 8))))


def test_qpie_gate_backend_matches_direct_injection(rng):
    img = random_image(rng, 8, 8)
    a = run_qpie_direct(img, backend="gate_exact", direct_load=False)
    b = run_qpie_direct(img, backend="operator")
    assert np.linalg.norm(a.state.amplitudes - b.state.amplitudes) <= 1e-10


def test_qpie_resources_full_register():
    report = run_qpie_direct(GrayscaleImage(np.ones((16, 16)))).resources
    assert report.breakdown["state_prep"].cx == 2 ** 8 - 2
    # 256x256 configuration, straight from the closed form
    from jqpie.synth import closed_form_resources
    big = closed_form_resources(8, 8, 6, method="qpie")
    assert big.breakdown["state_prep"].cx == 2 ** 16 - 2


# --- quantized pipeline ---------------------------------------------------------

def test_jqpie_r6_matches_classical_jpeg(rng):
    img = random_image(rng, 16, 16)
    result = run_jqpie(img, r=6, scale=1.0)
    oracle = reference_decode_pixels(img, "jpeg", scale=1.0)
    assert np.max(np.abs(result.reconstructed.pixels - oracle)) <= 1e-6
    assert 0.0 < result.success_probability <= 1.0


def test_jqpie_r3_matches_truncation_oracle(rng):
    img = random_image(rng, 16, 16)
    result = run_jqpie(img, r=3, scale=1.0)
    oracle = reference_decode_pixels(img, "jqpie_oracle", r=3, scale=1.0)
    assert np.max(np.abs(result.reconstructed.pixels - oracle)) <= 1e-6


def test_jqpie_success_probability_one_on_max_entry_support():
    # craft a block whose only quantized coefficient sits at the divisor
    # maximum (frequency index 53, divisor 121), where d_k = 1
    coeffs = np.zeros((8, 8))
    coeffs[6, 5] = 3 * 121.0
    block = idct2_block(coeffs)
    img = GrayscaleImage(block)
    result = run_jqpie(img, r=6, scale=1.0)
    assert result.success_probability == pytest.approx(1.0, abs=1e-12)


def test_jqpie_probability_matches_classical_norm(rng):
    for size in ((16, 16), (24, 24)):
        img = random_image(rng, *size)
        for r in (2, 4, 6):
            result = run_jqpie(img, r=r, scale=1.0)
            padded = pad_to_pow2(img)
            zz = truncate_zigzag(zigzag_coefficients(pad_and_partition(padded),
                                                     table=QuantTable(1.0)), r)
            amps = zz / np.linalg.norm(zz)
            diag = block_encoded_rescaler(QuantTable(1.0)).diagonal
            sigma = truncated_zigzag_map(r)
            expected = float(np.sum((amps * diag[sigma][None, :]) ** 2))
            assert abs(result.success_probability - expected) <= 1e-10


def test_jqpie_rejects_flat_zero_truncation():
    with pytest.raises(ValueError, match="zero"):
        # uniform mid-gray: nothing but tiny DC, scale huge -> all-zero quantized
        run_jqpie(GrayscaleImage(np.full((8, 8), 1.0)), r=2, scale=100.0)


# --- quantization-free pipeline ---------------------------------------------------

def test_qf_r6_equals_direct_qpie(rng):
    img = random_image(rng, 16, 16)
    qf = run_qf_jqpie(img, r=6)
    qpie = run_qpie_direct(pad_to_pow2(img))
    assert state_fidelity(qf.state, qpie.state) >= 1.0 - 1e-10
    assert qf.success_probability == 1.0


def test_qf_r5_matches_oracle_on_gradient():
    img = gradient_image(16, 16)
    result = run_qf_jqpie(img, r=5)
    oracle = reference_decode_pixels(img, "qf_oracle", r=5)
    assert np.max(np.abs(result.reconstructed.pixels - oracle)) <= 1e-6


def test_qf_monotone_truncation_error(rng):
    img = random_image(rng, 16, 16)
    errors = []
    for r in (2, 3, 4, 5, 6):
        recon = run_qf_jqpie(img, r=r).reconstructed.pixels
        errors.append(np.linalg.norm(img.pixels - recon))
    for coarse, fine in zip(errors, errors[1:]):
        assert fine <= coarse + 1e-9


# --- the central oracle-equivalence property ---------------------------------------

@pytest.mark.parametrize("size", [(16, 16), (24, 24), (32, 32)])
def test_oracle_equivalence_sweep(rng, size):
    img = random_image(rng, *size)
    for r in (2, 3, 4, 5, 6):
        qf = run_qf_jqpie(img, r=r)
        qf_oracle = reference_decode_pixels(img, "qf_oracle", r=r)
        assert np.max(np.abs(qf.reconstructed.pixels - qf_oracle)) <= 1e-6
        for scale in (0.5, 1.0, 2.0):
            jq = run_jqpie(img, r=r, scale=scale)
            jq_oracle = reference_decode_pixels(img, "jqpie_oracle", r=r, scale=scale)
            assert np.max(np.abs(jq.reconstructed.pixels - jq_oracle)) <= 1e-6


def test_oracle_equivalence_per_block_mode(rng):
    img = random_image(rng, 16, 16)
    for r in (3, 6):
        jq = run_jqpie(img, r=r, scale=1.0, norm_mode="per_block")
        oracle = reference_decode_pixels(img, "jqpie_oracle", r=r, scale=1.0)
        assert np.max(np.abs(jq.reconstructed.pixels - oracle)) <= 1e-6
        qf = run_qf_jqpie(img, r=r, norm_mode="per_block")
        qo = reference_decode_pixels(img, "qf_oracle", r=r)
        assert np.max(np.abs(qf.reconstructed.pixels - qo)) <= 1e-6


def test_per_block_flags_degenerate_blocks():
    # left half bright, right half exactly zero: the zero blocks carry no
    # coefficients and must come back as zero blocks
    pixels = np.zeros((8, 16))
    pixels[:, :8] = 200.0
    img = GrayscaleImage(pixels)
    result = run_qf_jqpie(img, r=6, norm_mode="per_block")
    assert result.norm_record.per_block_norms[1] == 0.0
    assert np.allclose(result.reconstructed.pixels[:, 8:], 0.0, atol=1e-12)
    assert np.allclose(result.reconstructed.pixels[:, :8], 200.0, atol=1e-9)


def test_non_pow2_images_pad_and_crop(rng):
    img = random_image(rng, 20, 12)   # pads to 32 x 16
    result = run_qf_jqpie(img, r=6)
    assert result.norm_record.padded_dims == (32, 16)
    assert result.reconstructed.pixels.shape == (20, 12)
    assert np.max(np.abs(result.reconstructed.pixels - img.pixels)) <= 1e-8


# --- stage-state check ---------------------------------------------------------------

def test_zigzag_stage_moves_amplitudes_exhaustively(rng):
    img = random_image(rng, 16, 16)
    grid = pad_and_partition(img)
    zz = truncate_zigzag(zigzag_coefficients(grid, table=None), 4)
    amps = zz / np.linalg.norm(zz)
    state = from_amplitudes(amps.reshape(-1).astype(complex))
    perm = synth_truncated_zigzag(4)
    from jqpie.qcircuit import Circuit
    circ = Circuit(8, perm.gates, (("index", 2), ("data", 6)))
    out = apply_circuit(state, circ)
    sigma = truncated_zigzag_map(4)
    for j in range(4):
        for k in range(64):
            loaded = amps[j, k]
            moved = out.amplitudes[j * 64 + sigma[k]].real
            assert abs(moved - loaded) < 1e-12


# --- readout models --------------------------------------------------------------------

def test_measurement_model_loses_signs():
    record = NormalizationRecord(10.0, None, "global", None, (8, 8))
    amps = np.zeros(64)
    amps[0] = math.sqrt(1 - 0.04)
    amps[9] = -0.2               # reconstructs pixel -2.0 under amplitudes
    state = StateVector(amps.astype(complex), 6)
    signed = readout_image(state, record, (8, 8), model="amplitude")
    unsigned = readout_image(state, record, (8, 8), model="measurement")
    assert signed.pixels[1, 1] == pytest.approx(-2.0, abs=1e-12)
    assert unsigned.pixels[1, 1] == pytest.approx(2.0, abs=1e-12)


def test_per_block_readout_matches_global_for_equal_energy(rng):
    # tile one block so every block carries identical energy
    block = rng.uniform(10, 200, (8, 8))
    img = GrayscaleImage(np.tile(block, (2, 2)))
    a = run_qf_jqpie(img, r=6, norm_mode="global").reconstructed.pixels
    b = run_qf_jqpie(img, r=6, norm_mode="per_block").reconstructed.pixels
    assert np.max(np.abs(a - b)) <= 1e-9


def test_readout_validation(rng):
    record = NormalizationRecord(10.0, None, "global", None, (8, 8))
    state = StateVector(np.zeros(64, dtype=complex), 6)
    with pytest.raises(ValueError):
        readout_image(state, record, (8, 8), model="telepathy")
    bad_record = NormalizationRecord(10.0, None, "global", None, (16, 16))
    with pytest.raises(ValueError):
        readout_image(state, bad_record, (16, 16))


def test_normalization_record_validation():
    with pytest.raises(ValueError):
        NormalizationRecord(0.0, None, "global", None, (8, 8))
    with pytest.raises(ValueError):
        NormalizationRecord(1.0, None, "weird", None, (8, 8))
    with pytest.raises(ValueError):
        NormalizationRecord(1.0, None, "global", np.ones(4), (8, 8))


def test_pipeline_result_serializes(rng):
    img = random_image(rng, 16, 16)
    result = run_jqpie(img, r=4)
    payload = result.to_json()
    assert 0 < payload["success_probability"] <= 1
    assert payload["normalization"]["lambda"] == 121.0
    assert payload["resources"]["breakdown"]["inverse_quantization"]["cx"] == 64
    assert isinstance(result.dumps(), str)


def test_backend_equivalence_full_pipelines(rng):
    img = random_image(rng, 16, 16)
    for r in (2, 4, 6):
        a = run_jqpie(img, r=r, backend="gate_exact", direct_load=False)
        b = run_jqpie(img, r=r, backend="operator", direct_load=False)
        assert np.linalg.norm(a.state.amplitudes - b.state.amplitudes) <= 1e-8
        qa = run_qf_jqpie(img, r=r, backend="gate_exact", direct_load=False)
        qb = run_qf_jqpie(img, r=r, backend="operator", direct_load=False)
        assert np.linalg.norm(qa.state.amplitudes - qb.state.amplitudes) <= 1e-8


def test_direct_load_requires_operator_backend(rng):
    img = random_image(rng, 8, 8)
    with pytest.raises(ValueError):
        run_jqpie(img, r=4, backend="gate_exact", direct_load=True)


def test_direct_load_matches_cascade(rng):
    img = random_image(rng, 16, 16)
    a = run_jqpie(img, r=5, direct_load=True)
    b = run_jqpie(img, r=5, direct_load=False)
    assert np.linalg.norm(a.state.amplitudes - b.state.amplitudes) <= 1e-10


def test_large_image_operator_backend(rng):
    # direct loading keeps megapixel-free large cases fast
    img = random_image(rng, 128, 128)
    result = run_qf_jqpie(img, r=4)
    oracle = reference_decode_pixels(img, "qf_oracle", r=4)
    assert np.max(np.abs(result.reconstructed.pixels - oracle)) <= 1e-6
