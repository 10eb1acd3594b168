import dataclasses
import json

import pytest

from screwspec import (
    InvalidParameterError,
    Model,
    PhysicalParams,
    SweepSpec,
    rows_to_csv,
    rows_to_json,
    sweep_rows,
    sweep_values,
)

BASE = PhysicalParams(
    model=Model.OSCILLATOR,
    mass=1.0,
    omega0=2.0,
    beta=0.5,
    k=0.5,
    ell=2,
    flux=0.75,
)

# A trap weak enough that the closed-form pair goes complex for small
# |iota|: disc = 24 iota^2 - 19.125, so the no-level band is |iota| < 0.893.
WEAK = dataclasses.replace(BASE, omega0=0.5)


class TestSpec:
    def test_parameter_whitelist(self):
        with pytest.raises(InvalidParameterError, match="cannot sweep"):
            SweepSpec(parameter="mass", start=0.5, stop=1.0, steps=3)

    def test_minimum_two_steps(self):
        with pytest.raises(InvalidParameterError, match="steps"):
            SweepSpec(parameter="flux", start=0.0, stop=1.0, steps=1)

    def test_method_and_branch_choices(self):
        with pytest.raises(InvalidParameterError, match="method"):
            SweepSpec(parameter="flux", start=0, stop=1, steps=2, method="magic")
        with pytest.raises(InvalidParameterError, match="branch"):
            SweepSpec(parameter="flux", start=0, stop=1, steps=2, branch="middle")

    def test_values_inclusive(self):
        spec = SweepSpec(parameter="beta", start=0.3, stop=0.7, steps=5)
        values = sweep_values(spec)
        assert values[0] == 0.3
        assert values[-1] == 0.7
        assert len(values) == 5

    def test_ell_sweep_must_hit_integers(self):
        spec = SweepSpec(parameter="ell", start=0, stop=1, steps=3)
        with pytest.raises(InvalidParameterError, match="integers"):
            sweep_values(spec)
        ok = SweepSpec(parameter="ell", start=-1, stop=3, steps=5)
        assert sweep_values(ok) == [-1, 0, 1, 2, 3]


class TestRows:
    def test_two_branches_per_value(self):
        spec = SweepSpec(parameter="beta", start=0.3, stop=0.7, steps=3)
        rows = sweep_rows(BASE, spec)
        assert len(rows) == 6
        assert [r.branch for r in rows] == ["minus", "plus"] * 3

    def test_branch_filter(self):
        spec = SweepSpec(
            parameter="beta", start=0.3, stop=0.7, steps=2, branch="minus"
        )
        rows = sweep_rows(BASE, spec)
        assert len(rows) == 2
        assert all(r.branch == "minus" for r in rows)
        assert rows[0].energy == pytest.approx(12.796908223351618, rel=1e-13)
        assert rows[1].energy == pytest.approx(8.128083277382432, rel=1e-13)

    def test_gaps_keep_their_rows(self):
        # iota crosses the region with no real pair partway through this
        # flux range; the rows must stay, with the (negative)
        # discriminant recorded and everything else empty.
        spec = SweepSpec(parameter="flux", start=0.0, stop=2.0, steps=9)
        rows = sweep_rows(WEAK, spec)
        assert len(rows) == 18
        empty = [r for r in rows if r.energy is None]
        filled = [r for r in rows if r.energy is not None]
        assert len(empty) == 10 and len(filled) == 8
        for r in empty:
            assert r.discriminant is not None and r.discriminant < 0
            assert r.spectral is None and r.termination_defect is None

    def test_flux_shift_matches_ell_shift(self):
        # same iota values: (ell = 2, flux in [0, 2]) against
        # (ell = 3, flux in [1, 3]) must give identical spectra cell by
        # cell, including which cells are empty.
        spec_a = SweepSpec(parameter="flux", start=0.0, stop=2.0, steps=9)
        spec_b = SweepSpec(parameter="flux", start=1.0, stop=3.0, steps=9)
        rows_a = sweep_rows(WEAK, spec_a)
        rows_b = sweep_rows(dataclasses.replace(WEAK, ell=3), spec_b)
        assert len(rows_a) == len(rows_b)
        for ra, rb in zip(rows_a, rows_b):
            assert rb.param_value == pytest.approx(ra.param_value + 1.0)
            assert (ra.energy is None) == (rb.energy is None)
            if ra.energy is not None:
                assert rb.energy == pytest.approx(ra.energy, abs=1e-12)

    def test_truncation_method_populates_defect(self):
        spec = SweepSpec(
            parameter="k", start=0.3, stop=0.8, steps=3, method="truncation"
        )
        rows = sweep_rows(BASE, spec)
        for r in rows:
            if r.energy is not None:
                assert r.termination_defect is not None
                assert r.termination_defect >= 0.0

    def test_jobs_do_not_change_output(self):
        spec = SweepSpec(parameter="Omega", start=-1.0, stop=1.0, steps=7)
        serial = rows_to_csv(sweep_rows(BASE, spec, jobs=1))
        parallel = rows_to_csv(sweep_rows(BASE, spec, jobs=4))
        assert serial == parallel

    def test_jobs_validation(self):
        spec = SweepSpec(parameter="Omega", start=-1.0, stop=1.0, steps=2)
        with pytest.raises(InvalidParameterError, match="jobs"):
            sweep_rows(BASE, spec, jobs=0)


class TestSerialisation:
    def test_csv_header_and_precision(self):
        spec = SweepSpec(
            parameter="beta", start=0.3, stop=0.7, steps=2, branch="minus"
        )
        text = rows_to_csv(sweep_rows(BASE, spec))
        lines = text.splitlines()
        assert lines[0] == (
            "param_value,ell,branch,energy,spectral,discriminant,termination_defect"
        )
        assert lines[1].startswith("0.29999999999999999,2,minus,")

    def test_csv_empty_cells(self):
        spec = SweepSpec(parameter="flux", start=1.25, stop=1.75, steps=2)
        text = rows_to_csv(sweep_rows(WEAK, spec))
        # iota in [0, 0.5] here: no real pair, three empty cells around
        # the recorded discriminant
        for line in text.splitlines()[1:]:
            fields = line.split(",")
            assert fields[3] == "" and fields[4] == "" and fields[6] == ""
            assert float(fields[5]) < 0

    def test_csv_byte_stability(self):
        spec = SweepSpec(parameter="gamma", start=0.0, stop=1.0, steps=5)
        a = rows_to_csv(sweep_rows(BASE, spec))
        b = rows_to_csv(sweep_rows(BASE, spec))
        assert a == b

    def test_json_round_trip(self):
        spec = SweepSpec(parameter="beta", start=0.3, stop=0.7, steps=2)
        rows = sweep_rows(BASE, spec)
        data = json.loads(rows_to_json(rows))
        assert len(data) == len(rows)
        assert data[0]["branch"] == "minus"
        assert data[0]["energy"] == rows[0].energy
