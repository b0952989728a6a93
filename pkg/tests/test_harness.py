import math

import numpy as np
import pytest

from losmimo.harness import (
    CSV_COLUMNS,
    Scenario,
    _row_record,
    parse_scenario,
    parse_scenario_file,
    psd_check,
    run_scenario,
    run_sweep,
    scenario_to_text,
    validate_scenario,
    write_rows,
)


def _payload(rows):
    # everything except wall time, which varies run to run
    return [(_row_record(r), r.evm_pooled) for r in rows]
from losmimo.phasenoise import StationaryModel, WienerModel


class TestParseScenario:
    def test_minimal_defaults(self):
        s = parse_scenario("id = demo\n")
        assert s.scenario_id == "demo"
        assert s.n == 4 and s.pn_model == "none" and s.csi == "training"

    def test_full_example(self):
        text = """
        # floor study
        id = floor
        n = 4
        snr_db = 10 20, 30
        k_db = inf
        constellation = QAM16
        l_d = 500
        trials = 12
        pn_model = wiener
        sigma2_delta = 1e-4
        topology = individual-individual
        compensation = true
        alpha = 0.15
        csi = perfect
        master_seed = 7
        """
        s = parse_scenario(text)
        assert s.snr_db == (10.0, 20.0, 30.0)
        assert math.isinf(s.k_db)
        assert s.compensation and s.alpha == 0.15
        assert s.csi == "perfect" and s.master_seed == 7

    def test_roundtrip(self):
        s = parse_scenario("id = rt\npn_model = stationary\nmask = dancila115\nk_db = 10\n")
        assert parse_scenario(scenario_to_text(s)) == s

    def test_perfect_csi_alias(self):
        assert parse_scenario("id = a\nperfect_csi = true\n").csi == "perfect"
        assert parse_scenario("id = a\nperfect_csi = false\n").csi == "training"

    def test_alias_conflict_rejected(self):
        with pytest.raises(ValueError, match="not both"):
            parse_scenario("id = a\ncsi = perfect\nperfect_csi = true\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="line 2.*unknown"):
            parse_scenario("id = a\nbogus = 1\n")

    def test_repeated_key_rejected(self):
        with pytest.raises(ValueError, match="repeated"):
            parse_scenario("id = a\nn = 2\nn = 4\n")

    def test_bad_value_names_line(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_scenario("id = a\ntrials = soon\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ValueError, match="key = value"):
            parse_scenario("id = a\njust words\n")

    def test_file_stem_is_default_id(self, tmp_path):
        p = tmp_path / "night_run.scn"
        p.write_text("n = 2\ntrials = 3\n")
        assert parse_scenario_file(p).scenario_id == "night_run"


class TestValidateScenario:
    def test_named_parameter_in_error(self):
        with pytest.raises(ValueError, match="trials"):
            validate_scenario(Scenario("x", trials=0))
        with pytest.raises(ValueError, match="l_d"):
            validate_scenario(Scenario("x", l_d=0))
        with pytest.raises(ValueError, match="pn_model"):
            validate_scenario(Scenario("x", pn_model="flicker"))

    def test_untrainable_order_rejected(self):
        with pytest.raises(ValueError, match="n = 28"):
            validate_scenario(Scenario("x", n=28))

    def test_untrainable_order_ok_with_perfect_csi(self):
        validate_scenario(Scenario("x", n=28, csi="perfect"))

    def test_bad_mask_rejected(self):
        with pytest.raises(ValueError):
            validate_scenario(Scenario("x", pn_model="stationary", mask="nosuchmask"))


def _tiny(**kw) -> Scenario:
    base = dict(
        scenario_id="tiny",
        n=2,
        snr_db=(15.0, 25.0),
        l_d=200,
        trials=8,
        pn_model="wiener",
        sigma2_delta=1e-4,
        master_seed=99,
    )
    base.update(kw)
    return Scenario(**base)


class TestRunScenario:
    def test_row_per_snr_point(self):
        rows = run_scenario(_tiny())
        assert len(rows) == 2
        assert [r.snr_db for r in rows] == [15.0, 25.0]
        assert all(r.symbols == 8 * 2 * 200 for r in rows)
        assert all(r.scenario_id == "tiny" and r.seed == 99 for r in rows)

    def test_deterministic(self):
        a = run_scenario(_tiny())
        b = run_scenario(_tiny())
        assert _payload(a) == _payload(b)

    def test_seed_changes_results(self):
        a = run_scenario(_tiny())
        b = run_scenario(_tiny(master_seed=100))
        assert a[0].evm != b[0].evm

    def test_evm_sane_without_pn(self):
        rows = run_scenario(_tiny(pn_model="none", snr_db=(20.0,), trials=40, csi="perfect"))
        assert rows[0].evm == pytest.approx(0.1, rel=0.05)
        assert rows[0].evm_pooled == pytest.approx(0.1, rel=0.05)

    def test_wall_time_recorded(self):
        rows = run_scenario(_tiny())
        assert rows[0].wall_time_s > 0
        assert rows[0].wall_time_s == rows[1].wall_time_s

    def test_bad_workers(self):
        with pytest.raises(ValueError):
            run_scenario(_tiny(), workers=0)

    def test_parallel_matches_serial(self):
        s = _tiny(trials=6, snr_db=(20.0,))
        assert _payload(run_scenario(s, workers=1)) == _payload(run_scenario(s, workers=2))


class TestCsvOutput:
    def test_header_and_rows(self, tmp_path):
        out = tmp_path / "rows.csv"
        rows = run_sweep([_tiny()], out_path=out)
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(rows)
        first = lines[1].split(",")
        assert first[0] == "tiny" and first[1] == "2" and first[2] == "inf"
        assert first[4] == "wiener" and first[5] == "0.0001" and first[7] == "0"

    def test_append_mode(self, tmp_path):
        out = tmp_path / "rows.csv"
        write_rows(out, run_scenario(_tiny()))
        write_rows(out, run_scenario(_tiny(scenario_id="more")), append=True)
        lines = out.read_text().splitlines()
        assert len(lines) == 5
        assert sum(1 for ln in lines if ln.startswith("more,")) == 2

    def test_append_header_mismatch_rejected(self, tmp_path):
        out = tmp_path / "rows.csv"
        out.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            write_rows(out, run_scenario(_tiny()), append=True)

    def test_append_to_empty_file_writes_header(self, tmp_path):
        out = tmp_path / "rows.csv"
        out.write_text("")
        write_rows(out, run_scenario(_tiny()), append=True)
        assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_no_rows_still_has_header(self, tmp_path):
        out = tmp_path / "rows.csv"
        write_rows(out, [])
        assert out.read_text() == ",".join(CSV_COLUMNS) + "\n"


class TestPsdCheck:
    def test_wiener_passes(self):
        rep = psd_check(WienerModel(1e-4), samples=2**18, rs=5)
        assert rep.kind == "wiener" and rep.passed
        assert rep.max_abs_err_db <= rep.tol_db

    def test_stationary_mask_passes(self):
        mask = ((1e6, -90.0), (1e8, -130.0))
        rep = psd_check(StationaryModel(mask), samples=2**18, rs=6)
        assert rep.kind == "stationary" and rep.passed

    def test_white_mask_is_flat(self):
        # equal levels at both ends: every in-band band must sit near the line
        mask = ((1e6, -100.0), (1e8, -100.0))
        rep = psd_check(StationaryModel(mask), samples=2**18, rs=7, tol_db=1.5)
        assert rep.passed

    def test_insufficient_samples_rejected(self):
        with pytest.raises(ValueError, match="insufficient"):
            psd_check(WienerModel(1e-4), samples=1024)
        with pytest.raises(ValueError, match="insufficient"):
            psd_check(StationaryModel(((1e6, -90.0),)), samples=1024)

    def test_csv_dump(self, tmp_path):
        out = tmp_path / "psd.csv"
        rep = psd_check(WienerModel(1e-4), samples=2**18, rs=8, out_path=out)
        lines = out.read_text().splitlines()
        assert lines[0] == "freq_hz,est_db,target_db,in_band"
        assert len(lines) == 1 + len(rep.freq_hz)

    def test_unsupported_model_rejected(self):
        with pytest.raises(TypeError):
            psd_check(object())

    def test_deterministic_given_seed(self):
        a = psd_check(WienerModel(1e-5), samples=2**18, rs=9)
        b = psd_check(WienerModel(1e-5), samples=2**18, rs=9)
        assert np.array_equal(a.est_db, b.est_db)
