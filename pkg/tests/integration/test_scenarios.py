"""Integration tests running every bundled scenario end to end."""

import json

import pytest

from fairsim.scenarios.config import bundled_scenarios, load_scenario
from fairsim.scenarios.outputs import RACES_FILE, REPORT_FILE, read_races, read_report, write_outputs
from fairsim.scenarios.runner import run_scenario
from fairsim.scenarios.simulation import ExchangeSimulation
from fairsim.scenarios.sweep import set_parameter


RACES = 40


@pytest.fixture(scope="module")
def results():
    """One short run per bundled scenario, shared by the whole module."""
    return {name: run_scenario(load_scenario(name), races=RACES) for name in bundled_scenarios()}


@pytest.mark.integration
class TestBundledScenarios:
    """Every shipped scenario runs and audits cleanly."""

    @pytest.mark.parametrize("name", bundled_scenarios())
    def test_runs_and_writes_outputs(self, results, name, tmp_path):
        result = results[name]
        report = result.report
        assert report.scenario == name
        assert report.races + report.uncontested_races == RACES
        assert report.req3_violations == 0
        epsilons = [p.epsilon for p in report.epsilon_of_delta]
        assert epsilons == sorted(epsilons)
        assert report.trace_digest == result.trace.digest()
        assert result.trace.is_ordered()

        written = write_outputs(result, tmp_path, export_trace=True, plot_data=True)
        assert set(written) == {"races", "trades", "report", "resolved_config", "trace", "ecdf"}
        assert read_report(tmp_path) == report
        rows = read_races(tmp_path)
        assert {int(row["stimulus_id"]) for row in rows} <= set(range(RACES))
        resolved = json.loads((tmp_path / "resolved_config.json").read_text(encoding="utf-8"))
        assert resolved["stimuli"]["count"] == RACES

    def test_baseline_is_perfectly_fair(self, results):
        report = results["baseline_perfect"].report
        assert report.max_spread == 0
        assert report.req1_max_spread == 0
        assert report.pair("fast", "slow").faster_win_rate == 1.0

    def test_early_login_always_hears_first(self, results):
        report = results["nse_sequential_feed"].report
        assert report.req1_max_spread == 1000
        assert report.pair("early", "late").win_rate("early") == 1.0

    def test_truncation_beats_full_orders_and_critical_cuts_drop(self, results):
        report = results["switch_truncation"].report
        assert report.pair("full", "trimmed").win_rate("trimmed") == 1.0
        assert report.dropped_messages == {"truncated critical fields": RACES}
        assert all(r.entry("reckless") is None for r in results["switch_truncation"].races)

    def test_stale_quote_sniped(self, results):
        result = results["sniping_stale_quote"]
        assert {r.winner for r in result.races} == {"sniper"}
        assert result.report.pair("maker", "sniper").faster == "sniper"

    def test_fast_link_beats_exchange_route(self, results):
        assert {r.winner for r in results["ebs_fast_link"].races} == {"sniper"}

    def test_speedbump_restores_routed_priority(self, results):
        assert {r.winner for r in results["ebs_fast_link_speedbump"].races} == {"router"}

    def test_replicator_duplicates_discarded(self, results):
        report = results["cme_gateway_broadcast"].report
        assert report.duplicates_discarded == 3 * RACES

    def test_optimist_pre_positions(self, results):
        result = results["optimistic_messaging"]
        entries = [r.entry("optimist") for r in result.races]
        assert any(r.pre_positioned(e) for r, e in zip(result.races, entries) if e is not None)

    def test_trades_match_trades_file(self, results, tmp_path):
        result = results["jitter_only"]
        write_outputs(result, tmp_path)
        lines = (tmp_path / "trades.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "time_ns,taker_id,maker_id,price_ticks,qty"
        assert len(lines) - 1 == len(result.trades)
        assert (tmp_path / RACES_FILE).exists() and (tmp_path / REPORT_FILE).exists()


@pytest.mark.integration
class TestLongRunState:
    """Per-message engine state is released as races close."""

    def test_dedup_keys_pruned_but_duplicates_still_caught(self):
        config = load_scenario("cme_gateway_broadcast").with_race_count(RACES)
        simulation = ExchangeSimulation(config, seed=1)
        simulation.run()
        engine = simulation.engines["main"]
        assert simulation.duplicates == 3 * RACES
        assert 0 < engine.remembered <= len(config.participants)

    def test_dead_messages_pruned(self):
        config = load_scenario("optimistic_messaging").with_race_count(RACES)
        config = set_parameter(config, "participants.optimist.abort_rate", 0.5)
        simulation = ExchangeSimulation(config, seed=1)
        simulation.run()
        engine = simulation.engines["main"]
        assert engine.reassembler.abandoned > 1
        assert engine.reassembler.dead <= 1
