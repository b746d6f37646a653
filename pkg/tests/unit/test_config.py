"""Unit tests for scenario loading and validation."""

import json

import pytest
import yaml

from fairsim.infra.feed import FeedKind
from fairsim.infra.latency import LatencyKind
from fairsim.participants.models import StrategyKind
from fairsim.scenarios.config import (
    ScenarioConfig,
    bundled_scenarios,
    load_scenario,
    parse_scenario,
)
from fairsim.scenarios.errors import ScenarioError, ScenarioValidationError, TopologyError
from tests.fixtures.scenarios import MS, US, gateway, racer, scenario, two_racers


EXPECTED_BUNDLED = {
    "baseline_perfect",
    "jitter_only",
    "nse_sequential_feed",
    "nse_randomized_feed",
    "cme_gateway_broadcast",
    "switch_truncation",
    "optimistic_messaging",
    "ebs_fast_link",
    "ebs_fast_link_speedbump",
    "batch_window",
    "heavy_tail_jitter",
    "sniping_stale_quote",
}


@pytest.mark.unit
class TestParseScenario:
    """Schema validation."""

    def test_defaults_are_resolved(self, two_racer_config):
        resolved = two_racer_config.resolved()
        assert resolved["engine"]["timestamp_policy"] == "first-fragment"
        assert resolved["engine"]["mtu"] == 1500
        assert resolved["remediation"]["batch_window_ns"] == 0
        assert resolved["audit"]["deltas"] == [0.5, 0.9, 0.99, 0.999]
        assert resolved["participants"][0]["message_bytes"] == 200

    def test_error_names_dotted_path(self):
        doc = two_racers()
        del doc["participants"][0]["reaction_time_ns"]
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario(doc)
        paths = [path for path, _ in exc_info.value.errors]
        assert "participants.0.reaction_time_ns" in paths
        assert "participants.0.reaction_time_ns" in str(exc_info.value)

    def test_unknown_field_rejected(self):
        doc = two_racers()
        doc["engine"] = {"mtu": 1500, "turbo": True}
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario(doc)
        assert exc_info.value.errors[0][0] == "engine.turbo"

    def test_negative_reaction_time_rejected(self):
        with pytest.raises(ScenarioValidationError):
            parse_scenario(two_racers(r_fast=-1))

    def test_deltas_must_be_probabilities(self):
        with pytest.raises(ScenarioValidationError):
            parse_scenario(two_racers(audit={"deltas": [0.5, 1.2]}))

    def test_latency_params_required_per_kind(self):
        doc = two_racers()
        doc["gateways"][0]["latency"] = {"kind": "uniform-jitter", "base_ns": 10}
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario(doc)
        path, message = exc_info.value.errors[0]
        assert path == "gateways.0.latency"
        assert "high" in message

    @pytest.mark.parametrize("kind,params", [
        ("normal", {"mean": 10}),
        ("lognormal", {"median": 1000}),
        ("pareto", {"shape": 2.5}),
    ])
    def test_feed_jitter_params_checked(self, kind, params):
        doc = two_racers()
        doc["feeds"][0]["jitter"] = {"kind": kind, "base_ns": 100, "params": params}
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario(doc)
        assert exc_info.value.errors[0][0] == "feeds.0.jitter"

    def test_constant_latency_needs_no_params(self):
        doc = two_racers()
        doc["gateways"][0]["latency"] = {"kind": "constant", "base_ns": 10}
        assert parse_scenario(doc).gateways[0].latency.params == {}

    def test_enums_parsed(self):
        config = parse_scenario(scenario(
            participants=[racer("a", US, ["gw1", "gw2"], strategy="replicator")],
            gateways=[gateway("gw1", {"kind": "uniform-jitter", "base_ns": 10, "params": {"high": 5}}),
                      gateway("gw2")],
            feeds=[{"id": "feed", "book": "main", "policy": "randomized-sequential"}],
        ))
        assert config.participants[0].strategy is StrategyKind.REPLICATOR
        assert config.gateways[0].latency.kind is LatencyKind.UNIFORM_JITTER
        assert config.feeds[0].policy is FeedKind.RANDOMIZED_SEQUENTIAL


@pytest.mark.unit
class TestTopology:
    """Cross-reference checks."""

    def test_unknown_gateway(self):
        doc = two_racers()
        doc["participants"][0]["gateways"] = ["gw9"]
        with pytest.raises(TopologyError, match="gw9"):
            parse_scenario(doc)

    def test_unknown_feed(self):
        doc = two_racers()
        doc["participants"][1]["feed"] = "nowhere"
        with pytest.raises(TopologyError, match="nowhere"):
            parse_scenario(doc)

    def test_duplicate_participant(self):
        doc = two_racers()
        doc["participants"][1]["id"] = "fast"
        with pytest.raises(TopologyError, match="Duplicate"):
            parse_scenario(doc)

    def test_replicator_needs_two_gateways(self):
        doc = two_racers()
        doc["participants"][0]["strategy"] = "replicator"
        with pytest.raises(TopologyError, match="two gateways"):
            parse_scenario(doc)

    def test_unknown_speedbump_target(self):
        with pytest.raises(TopologyError, match="Speedbump"):
            parse_scenario(two_racers(remediation={"speedbumps": {"gw7": 100}}))

    def test_lead_must_precede_first_stimulus(self):
        doc = two_racers(stimuli={"start_ns": MS})
        doc["participants"][0].update(
            {"strategy": "optimistic-messenger", "lead_ns": 2 * MS, "message_bytes": 3000}
        )
        with pytest.raises(TopologyError, match="lead"):
            parse_scenario(doc)

    def test_optimistic_message_must_span_fragments(self):
        doc = two_racers(stimuli={"start_ns": 2 * MS})
        doc["participants"][0].update({"strategy": "optimistic-messenger", "lead_ns": 1000})
        with pytest.raises(TopologyError, match="fits one fragment at mtu 1500"):
            parse_scenario(doc)

    def test_optimistic_message_checked_against_engine_mtu(self):
        doc = two_racers(stimuli={"start_ns": 2 * MS}, engine={"mtu": 100})
        doc["participants"][0].update({"strategy": "optimistic-messenger", "lead_ns": 1000})
        config = parse_scenario(doc)
        assert config.participants[0].message_bytes == 200

    def test_optimistic_messenger_needs_feed(self):
        doc = two_racers(stimuli={"start_ns": 2 * MS})
        del doc["participants"][0]["feed"]
        doc["participants"][0].update(
            {"strategy": "optimistic-messenger", "lead_ns": 1000, "message_bytes": 3000}
        )
        with pytest.raises(TopologyError, match="needs a feed"):
            parse_scenario(doc)

    def test_stale_quote_needs_resting_maker_owner(self):
        with pytest.raises(TopologyError, match="resting-maker"):
            parse_scenario(two_racers(stimuli={"kind": "stale_quote", "owner": "fast"}))

    def test_routed_order_needs_link(self):
        with pytest.raises(TopologyError, match="link"):
            parse_scenario(two_racers(stimuli={"kind": "routed_order", "link": "none"}))

    def test_login_order_names_participants(self):
        doc = two_racers()
        doc["feeds"][0]["login_order"] = ["slow", "ghost"]
        with pytest.raises(TopologyError, match="ghost"):
            parse_scenario(doc)


@pytest.mark.unit
class TestConfigHash:
    """Stable identity of a resolved config."""

    def test_equal_documents_hash_equal(self):
        assert parse_scenario(two_racers()).config_hash() == parse_scenario(two_racers()).config_hash()

    def test_explicit_default_hashes_like_omitted(self):
        explicit = two_racers(engine={"mtu": 1500})
        assert parse_scenario(explicit).config_hash() == parse_scenario(two_racers()).config_hash()

    def test_any_change_changes_hash(self):
        assert parse_scenario(two_racers(r_slow=8 * US)).config_hash() != parse_scenario(two_racers()).config_hash()

    def test_race_override_only_touches_count(self, two_racer_config):
        shorter = two_racer_config.with_race_count(5)
        assert shorter.stimuli.count == 5
        assert two_racer_config.stimuli.count == 20
        assert two_racer_config.with_race_count(None) is two_racer_config


@pytest.mark.unit
class TestLoadScenario:
    """Files and bundled scenarios."""

    def test_load_json_and_yaml_agree(self, tmp_path):
        doc = two_racers()
        json_path = tmp_path / "s.json"
        yaml_path = tmp_path / "s.yaml"
        json_path.write_text(json.dumps(doc), encoding="utf-8")
        yaml_path.write_text(yaml.safe_dump(doc), encoding="utf-8")
        assert load_scenario(json_path).config_hash() == load_scenario(yaml_path).config_hash()

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / "s.toml"
        path.write_text("name = 'x'", encoding="utf-8")
        with pytest.raises(ScenarioError, match="Unsupported"):
            load_scenario(path)

    def test_malformed_yaml(self, tmp_path):
        path = tmp_path / "s.yaml"
        path.write_text("name: [unclosed", encoding="utf-8")
        with pytest.raises(ScenarioValidationError):
            load_scenario(path)

    def test_top_level_must_be_mapping(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ScenarioValidationError):
            load_scenario(path)

    def test_missing_source(self):
        with pytest.raises(ScenarioError, match="not found"):
            load_scenario("no_such_scenario")

    def test_bundled_scenarios_listed(self):
        assert set(bundled_scenarios()) == EXPECTED_BUNDLED

    @pytest.mark.parametrize("name", sorted(EXPECTED_BUNDLED))
    def test_every_bundled_scenario_validates(self, name):
        config = load_scenario(name)
        assert isinstance(config, ScenarioConfig)
        assert config.name == name
        assert config.description
