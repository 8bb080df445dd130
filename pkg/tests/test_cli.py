import subprocess
import sys

import pytest

from rfext.cli import main
from rfext.fileformat import HelperFile


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


@pytest.fixture
def secret(tmp_path):
    def write(bits, name="w.txt"):
        path = tmp_path / name
        path.write_text(bits + "\n")
        return str(path)

    return write


# --- params ---


def test_params_three_halves(capsys):
    code, out, _ = run(capsys, "params", "--n", "1024", "--m", "768", "--logd", "64", "--variant", "new")
    assert code == 0 and kv(out)["ell"] == "192"
    code, out, _ = run(capsys, "params", "--n", "1024", "--m", "768", "--logd", "64", "--variant", "dkrs-post")
    assert code == 0 and kv(out)["ell"] == "128"


def test_params_infeasible(capsys):
    code, _, err = run(capsys, "params", "--n", "64", "--m", "30", "--logd", "4")
    assert code == 2 and "uniformity constraint" in err


def test_params_rational_and_csv(capsys):
    code, out, _ = run(capsys, "params", "--n", "64", "--m", "95/2", "--logd", "15/2", "--csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 2
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert row["v"] == "24"


def test_params_fuzzy(capsys):
    code, out, _ = run(capsys, "params", "--variant", "fuzzy", "--code", "bch", "--n", "255", "--t", "8",
                       "--m", "255", "--logd", "0", "--truncate")
    f = kv(out)
    assert code == 0 and (f["v"], f["ell"], f["truncated"]) == ("52", "11", "1")
    code, _, err = run(capsys, "params", "--variant", "fuzzy", "--code-key", "bch-255-8", "--m", "255", "--logd", "0")
    assert code == 2 and "--truncate" in err


def test_usage_errors(capsys):
    code, _, _ = run(capsys, "params", "--m", "10", "--logd", "1")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus-command"])
    assert exc.value.code == 2


# --- gen / rep ---


def test_gen_rep_round_trip_deterministic(capsys, tmp_path, secret):
    w = secret("0110" * 16)
    h1, h2 = str(tmp_path / "h1"), str(tmp_path / "h2")
    args = ["--n", "64", "--m", "56", "--logd", "8", "--input", w]
    code, key1, err = run(capsys, "gen", *args, "--helper", h1, "--seed", "7")
    assert code == 0 and "seed" in err
    code, key2, _ = run(capsys, "gen", *args, "--helper", h2, "--seed", "7")
    assert code == 0 and key1 == key2
    assert open(h1, "rb").read() == open(h2, "rb").read()
    code, key3, _ = run(capsys, "rep", "--input", w, "--helper", h1)
    assert code == 0 and key3 == key1
    assert len(key1.strip()) == (32 - 16 + 3) // 4


@pytest.mark.parametrize("variant", ["new", "new-short", "dkrs-pre", "dkrs-post", "dkrs-improved-pre", "dkrs-improved-post"])
def test_gen_rep_variants(capsys, tmp_path, secret, variant):
    w = secret("1" * 40 + "0" * 24)
    h = str(tmp_path / "h")
    code, key, _ = run(capsys, "gen", "--n", "64", "--m", "60", "--logd", "4", "--loge", "3",
                       "--variant", variant, "--input", w, "--helper", h)
    assert code == 0
    code, key2, _ = run(capsys, "rep", "--input", w, "--helper", h)
    assert code == 0 and key2 == key


def test_fresh_seed_differs(capsys, tmp_path, secret):
    w = secret("01" * 32)
    keys = set()
    for j in range(3):
        code, key, _ = run(capsys, "gen", "--n", "64", "--m", "64", "--logd", "4", "--input", w,
                           "--helper", str(tmp_path / f"h{j}"))
        keys.add(key)
    assert len(keys) > 1


def test_tampered_sigma_rejects(capsys, tmp_path, secret):
    w = secret("0011" * 16)
    h = tmp_path / "h"
    run(capsys, "gen", "--n", "64", "--m", "56", "--logd", "8", "--input", w, "--helper", str(h), "--seed", "3")
    data = bytearray(h.read_bytes())
    data[-2] ^= 0x80  # first byte of sigma
    h.write_bytes(bytes(data))
    code, out, _ = run(capsys, "rep", "--input", w, "--helper", str(h))
    assert code == 1 and out.strip() == "REJECT"


def test_wrong_secret_rejects(capsys, tmp_path, secret):
    w = secret("0011" * 16)
    # flipping the first bit of b flips the first bit of y, which sigma covers
    w2 = secret("0011" * 8 + "1011" + "0011" * 7, "w2.txt")
    h = str(tmp_path / "h")
    run(capsys, "gen", "--n", "64", "--m", "56", "--logd", "16", "--input", w, "--helper", h, "--seed", "3")
    code, out, _ = run(capsys, "rep", "--input", w2, "--helper", h)
    assert code == 1 and out.strip() == "REJECT"


def test_input_formats(capsys, tmp_path):
    hexfile = tmp_path / "w.hex"
    hexfile.write_text("deadbeefcafef00d\n")
    raw = tmp_path / "w.raw"
    raw.write_bytes(bytes.fromhex("deadbeefcafef00d"))
    h1, h2 = str(tmp_path / "h1"), str(tmp_path / "h2")
    common = ["--n", "64", "--m", "60", "--logd", "4", "--seed", "1"]
    _, k1, _ = run(capsys, "gen", *common, "--input", str(hexfile), "--format", "hex", "--helper", h1)
    _, k2, _ = run(capsys, "gen", *common, "--input", str(raw), "--format", "raw", "--helper", h2)
    assert k1 == k2


def test_input_length_mismatch(capsys, tmp_path, secret):
    w = secret("0" * 63)
    code, _, err = run(capsys, "gen", "--n", "64", "--m", "60", "--logd", "4", "--input", w,
                       "--helper", str(tmp_path / "h"))
    assert code == 2 and "expected 64" in err
    code, _, _ = run(capsys, "gen", "--n", "64", "--m", "60", "--logd", "4", "--input", str(tmp_path / "none"),
                     "--helper", str(tmp_path / "h"))
    assert code == 2


def test_corrupt_helper_is_usage_error(capsys, tmp_path, secret):
    w = secret("0" * 64)
    h = tmp_path / "h"
    h.write_bytes(b"not a helper file at all")
    code, _, err = run(capsys, "rep", "--input", w, "--helper", str(h))
    assert code == 2 and "helper" in err


# --- fuzzy ---


def test_fuzzy_round_trip_with_errors(capsys, tmp_path, secret):
    import random

    rng = random.Random(2)
    bits = [rng.choice("01") for _ in range(255)]
    w = secret("".join(bits))
    for j in rng.sample(range(255), 8):
        bits[j] = "1" if bits[j] == "0" else "0"
    w_noisy = secret("".join(bits), "w2.txt")
    h = str(tmp_path / "h")
    flags = ["--code", "bch", "--n", "255", "--t", "8", "--m", "255", "--logd", "0", "--truncate"]
    code, key, _ = run(capsys, "fuzzy-gen", *flags, "--input", w, "--helper", h, "--seed", "5")
    assert code == 0
    code, key2, _ = run(capsys, "fuzzy-rep", "--input", w_noisy, "--helper", h)
    assert code == 0 and key2 == key
    hf = HelperFile.from_bytes(open(h, "rb").read())
    assert hf.is_fuzzy and hf.code_key == "bch-255-8"


def test_fuzzy_too_many_errors_rejects(capsys, tmp_path, secret):
    w = secret("0" * 255)
    far = secret("1" * 20 + "0" * 235, "far.txt")
    h = str(tmp_path / "h")
    run(capsys, "fuzzy-gen", "--code-key", "bch-255-8", "--v", "40", "--ell", "10", "--truncate",
        "--input", w, "--helper", h)
    code, out, _ = run(capsys, "fuzzy-rep", "--input", far, "--helper", h)
    assert code == 1 and out.strip() == "REJECT"


def test_helper_kind_mismatch(capsys, tmp_path, secret):
    w = secret("0" * 64)
    h = str(tmp_path / "h")
    run(capsys, "gen", "--n", "64", "--m", "60", "--logd", "4", "--input", w, "--helper", h)
    code, _, _ = run(capsys, "fuzzy-rep", "--input", w, "--helper", h)
    assert code == 2


# --- attack / verify ---


def test_attack_pass_and_report(capsys):
    code, out, _ = run(capsys, "attack", "--n", "20", "--m", "18", "--logd", "2", "--trials", "3000", "--seed", "1")
    f = kv(out)
    assert code == 0 and f["result"] == "PASS" and f["bound"] == "lower"
    assert f["guessed_bits"] == "2"
    code2, out2, _ = run(capsys, "attack", "--n", "20", "--m", "18", "--logd", "2", "--trials", "3000", "--seed", "1")
    assert out2 == out


def test_attack_transplant_and_csv(capsys):
    code, out, _ = run(capsys, "attack", "--variant", "new", "--n", "20", "--m", "18", "--logd", "2",
                       "--trials", "2000", "--csv")
    header, row = out.strip().splitlines()[:2]
    f = dict(zip(header.split(","), row.split(",")))
    assert code == 0 and f["result"] == "PASS" and f["bound"] == "upper"


def test_attack_adjusts_odd_degree(capsys):
    code, out, _ = run(capsys, "attack", "--n", "14", "--m", "12", "--logd", "2", "--variant", "new",
                       "--trials", "200")
    assert "adjustment=" in out and kv(out)["n"] == "12"


def test_attack_usage(capsys):
    code, _, _ = run(capsys, "attack", "--n", "20", "--m", "18", "--logd", "2", "--trials", "0")
    assert code == 2
    code, _, _ = run(capsys, "attack", "--n", "20", "--m", "8", "--logd", "2", "--trials", "10")
    assert code == 2


def test_verify_quick_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lemmas")
    assert code == 0 and "PASS" in out and "FAIL" not in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "rfext", "params", "--n", "64", "--m", "48", "--logd", "8", "--loge", "4"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    f = kv(proc.stdout)
    assert (f["v"], f["ell"]) == ("24", "8")
