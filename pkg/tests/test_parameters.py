"""
Parameter systems, the r-orbit, G and the certified growth-condition checks
"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from app.models.harness_models import Verdict
from app.models.parameter_models import RunConfig, SystemConfig
from app.services.errors import ConfigError, DomainError, ParameterError, PreconditionError
from app.services.parameters import (
    ParameterChecker,
    ParameterSystem,
    g_cutoff,
    g_terms,
    g_value,
    growth_constant_search,
    locate_window,
    r_sequence,
)
from app.services.towers import TowerReal


def test_r_orbit_from_two():
    r0, r1, r2, r3 = r_sequence(2, 4)
    assert r1.exact == 3
    assert r2.exact == 9
    # 9^f(9) = 10^log2(9)
    assert TowerReal.of(1478).lt(r3) is True
    assert r3.lt(1480) is True


def test_r_orbit_needs_r_above_one():
    with pytest.raises(DomainError):
        r_sequence(1, 3)


def test_toy_sequences(toy_system):
    assert toy_system.count == 3
    assert toy_system.k_int(3) == 16
    assert toy_system.m(1).exact == Fraction(3, 2)
    assert toy_system.m(2).exact == Fraction(15, 4)
    assert toy_system.eps(2).exact == 1
    assert toy_system.L(4) == 1 and toy_system.L(40) == 1
    with pytest.raises(ParameterError):
        toy_system.k(4)


def test_windows_and_g(toy_system):
    assert locate_window(1, toy_system) == 1
    assert locate_window(2, toy_system) == 2
    value = g_value(2, toy_system)
    assert 1 <= value.index <= 3
    with pytest.raises(DomainError):
        g_value(1, toy_system)


def test_g_cutoff_keeps_one_term_per_descent_level(toy_system):
    # f(f(3)) = log2 3 floors to 1 and L_1 = 0; f(f(2^255 - 1)) = 8 and L_8 = 1
    assert g_cutoff(3, toy_system) == 1
    assert g_cutoff(2 ** 255 - 1, toy_system) == 2


def test_honest_system_is_tower_defined():
    system = ParameterSystem(SystemConfig.honest())
    assert system.k(1).exact == 2 ** 1024
    assert not system.k(2).is_plain
    assert system.k(1).lt(system.k(2)) is True
    with pytest.raises(ParameterError):
        system.tree_rule()


def test_g_terms_stay_narrow_for_tower_arguments():
    system = ParameterSystem(SystemConfig.honest())
    first, second = g_terms(system.m(1), system)[:2]
    # both are f(m_1) f(k) / f(m_1 k) prod f(k_s)/k_s, about 1024 (1 - 2^-1014)
    for term in (first, second):
        assert term.is_plain
        assert TowerReal.of(1023).lt(term) is True
        assert term.lt(1025) is True


def test_base_growth_fails_for_toy_and_holds_for_honest(toy_system):
    assert ParameterChecker(toy_system).check_base_growth().verdict == Verdict.FAIL
    honest = ParameterChecker(ParameterSystem(SystemConfig.honest()))
    assert honest.check_base_growth().verdict == Verdict.PASS


def test_growth_constant_is_a_power_of_two():
    c, report = growth_constant_search()
    assert c is not None and c >= 2 and c & (c - 1) == 0
    assert report.passed
    assert report.measurements["d"] == 4 * c ** 3


def test_run_all_covers_every_condition(toy_system):
    names = {r.harness for r in ParameterChecker(toy_system).run_all()}
    assert {"base_growth", "power_growth", "epsilon_budget[j=1]", "g_monotonicity", "g_cutoff",
            "lacunary_set", "sigma_audit"} <= names


def test_system_config_validation():
    with pytest.raises(ValidationError):
        SystemConfig(ks=[4, 2])
    with pytest.raises(ValidationError):
        SystemConfig(ks=[2, 4], k1_tower=[2, 10])
    with pytest.raises(ValidationError):
        SystemConfig(ks=[2, 4], lacunary="dense")


def test_system_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        SystemConfig.load(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text('{"ks": [3, 1]}', encoding="utf-8")
    with pytest.raises(ConfigError):
        SystemConfig.load(str(bad))


def test_run_config_applies_surrogate_and_precision():
    config = RunConfig(command="gm", precision_bits=96, surrogate=True).system()
    assert config.lacunary == "surrogate"
    assert config.precision_bits == 96
    assert config.ks == [2, 4, 16]


def test_orbit_series_on_the_toy_system(toy_system):
    # r_0 = m_1 = 3/2; r_0..r_3 lie in [m_1, k_2], r_4 ~ 16.70 in (k_3, m_3), r_5 ~ 1.2e5 past m_3
    report = ParameterChecker(toy_system).check_orbit_series(toy_system.m(1))
    checks = {c.name: c for c in report.checks}
    assert report.measurements["start_bracket"] == 2
    assert report.measurements["escaped_at"] == 5
    assert [row["bracket"] for row in report.measurements["orbit"]] == [2, 2, 2, 2, 3, None]
    for ell in range(4):
        for name in ("orbit_f_lower", "g_tilde_half_f", "g_tilde_geometric"):
            assert checks[f"{name}[j=2,l={ell}]"].verdict == Verdict.PASS
    assert checks["orbit_lower[j=2,l=2]"].verdict == Verdict.PASS
    assert checks["orbit_lower[j=2,l=3]"].verdict == Verdict.PASS
    assert "orbit_lower[j=2,l=1]" not in checks
    # 1/sqrt(G~) sums to about 4.16 in bracket 2 against eps_1 + eps_2 = 3
    assert checks["bracket_budget[j=2]"].verdict == Verdict.FAIL
    assert checks["bracket_budget[j=2]"].hard
    assert checks["lower_part_sum[j=2]"].verdict == Verdict.PASS
    assert checks["lower_part_budget[j=2]"].verdict == Verdict.FAIL
    assert checks["g_tilde_above_k[j=3,l=4]"].verdict == Verdict.PASS
    assert checks["iteration_count[j=3]"].verdict == Verdict.PASS
    assert checks["iteration_count[j=3]"].hard
    assert checks["upper_part_sum[j=3]"].verdict == Verdict.PASS
    assert checks["upper_part_budget[j=3]"].verdict == Verdict.FAIL
    assert checks["bracket_budget[j=3]"].verdict == Verdict.PASS
    assert checks["visited_total"].verdict == Verdict.FAIL
    assert checks["series_total"].conditional and not checks["series_total"].hard
    assert report.verdict == Verdict.FAIL


def test_orbit_series_on_the_honest_system():
    system = ParameterSystem(SystemConfig.honest())
    assert locate_window(system.m(1), system) == 2
    report = ParameterChecker(system).check_orbit_series(system.m(1), terms=3)
    names = {c.name for c in report.checks}
    assert report.measurements["start_bracket"] == 2
    assert report.measurements["escaped_at"] is None
    assert {"orbit_f_lower[j=2,l=0]", "orbit_f_lower[j=2,l=1]", "orbit_f_lower[j=2,l=2]",
            "orbit_lower[j=2,l=2]", "g_tilde_geometric[j=2,l=0]", "lower_part_sum[j=2]",
            "lower_part_budget[j=2]", "bracket_budget[j=2]"} <= names
    assert not any(name.startswith("g_tilde_above_k") for name in names)
    assert not any(c.verdict == Verdict.FAIL for c in report.checks)
    assert not next(c for c in report.checks if c.name == "bracket_budget[j=2]").hard


def test_orbit_series_needs_a_bracket_past_the_first(toy_system):
    with pytest.raises(PreconditionError):
        ParameterChecker(toy_system).check_orbit_series(Fraction(5, 4))
