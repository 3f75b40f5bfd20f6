import pytest

import hsc_sim


def test_codec_helpers():
    assert hsc_sim.hamming_parity_width(32) == 6
    assert hsc_sim.hamming_parity_width(8) == 4
    assert hsc_sim.hamming_parity(0, 32) == 0
    # Standard CRC-8 check value for "123456789" needs bytes; a single byte
    # 0x01 with poly 0x07 and zero init leaves the polynomial itself.
    assert hsc_sim.crc_checkbits(0x01, 8, 0x07, 8) == 0x07
    with pytest.raises(hsc_sim.ParameterError):
        hsc_sim.hamming_parity_width(0)


def test_chunks_and_decode():
    assert hsc_sim.make_chunks(0, 0x11223344, 4) == [0x11, 0x22, 0x33, 0x44]
    assert hsc_sim.make_chunks(4, 0x13, 1) == [0x17]
    d = hsc_sim.decode(0x0000006F)
    assert d["op"] == "JAL" and d["control_flow"]
    assert hsc_sim.decode(0xFFFFFFFF)["op"] == "ILLEGAL"


def test_install_and_check():
    img = hsc_sim.gen_synthetic(216, seed=1)
    assert len(img) == 216
    chk = hsc_sim.install(img)
    assert chk.name == "PAPER_COMBINED"
    assert len(chk.members) == 2
    for i, w in enumerate(img.words):
        assert chk.check(img.address_of(i), w) == (False, 0)
    alarm, mask = chk.check(0, img.words[0] ^ 1)
    assert alarm and mask != 0
    assert chk.storage_bits() == 216 * 6 + 216 * 16
    assert hsc_sim.storage_bits("PAPER_COMBINED", 1288) == 28336


def test_snapshot_round_trip():
    chk = hsc_sim.install(hsc_sim.gen_synthetic(64, seed=2), "SINGLE_HSEC8")
    data = chk.serialize()
    back = hsc_sim.Checker.deserialize(data)
    assert back.serialize() == data
    with pytest.raises(hsc_sim.FormatError):
        hsc_sim.Checker.deserialize(data[:-3])


def test_collision_error():
    img = hsc_sim.ProgramImage([0x13, 0x93], base=0)
    with pytest.raises(hsc_sim.HscError):
        hsc_sim.install(img, "BOGUS")
    with pytest.raises(hsc_sim.AlignmentError):
        hsc_sim.ProgramImage([0x13], base=2)


def test_experiment_and_prediction():
    cfg = "\n".join([
        "image = synthetic:216:1",
        "preset = SINGLE_HSEC32",
        "runs_attacked = 2000",
        "runs_clean = 200",
        "attack_model = M1",
        "attack_variant = IN_IMAGE_ALIAS",
        "seed = 7",
    ])
    report, csv, md = hsc_sim.run_experiment(cfg, workers=2)
    assert report["runs_attacked"] == 2000
    assert report["fp_runs"] == 0
    assert 0.0 < report["fn_rate"] < 0.05
    assert csv.startswith("benchmark,preset,model")
    assert "| Benchmark |" in md
    again, _, _ = hsc_sim.run_experiment(cfg, workers=1)
    assert again == report

    img = hsc_sim.gen_synthetic(216, seed=1)
    chk = hsc_sim.install(img, "SINGLE_HSEC32")
    pred = hsc_sim.predict_fn(chk, img, samples=20000)
    assert 0.0 < pred["joint_rate"] < 0.05
    assert pred["uniform_baseline"] == pytest.approx(2.0 ** -6)

    with pytest.raises(hsc_sim.FormatError):
        hsc_sim.run_experiment("preset = SINGLE_HSEC32\n")
