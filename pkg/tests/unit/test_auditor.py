"""Unit tests for race records, fairness metrics, requirement checks and the report."""

import pytest

from fairsim.auditor.metrics import (
    Verdict,
    estimate_epsilon_delta,
    judge_race,
    victory_distribution,
)
from fairsim.auditor.races import AuditError, RaceEntry, RaceRecord, RaceTracker
from fairsim.auditor.report import FairnessReport, build_report
from fairsim.auditor.requirements import (
    AuditTrail,
    Submission,
    check_requirements,
    max_delivery_spread,
    priority_violations,
    submission_order_violations,
)
from fairsim.book.models import Side, Trade
from fairsim.infra.feed import Delivery


def race(stimulus_id, entries, t_e=1000, winner=None):
    """``entries`` maps participant to ``(reaction_time, t_arrival)``."""
    return RaceRecord(
        stimulus_id,
        t_e,
        [RaceEntry(p, r, t, won=(p == winner)) for p, (r, t) in entries.items()],
        engine="main",
    )


def trade(price, maker_seq, maker_side=Side.ASK):
    return Trade(1, 2, price, 1, 0, "t", "m", maker_side, maker_seq)


@pytest.mark.unit
class TestRaceTracker:
    """Assembling race records from engine notifications."""

    def test_first_arrival_per_participant_counts(self):
        tracker = RaceTracker()
        tracker.open(0, 100, "main")
        assert tracker.arrival(0, "a", 5, 200)
        assert not tracker.arrival(0, "a", 5, 150)
        assert tracker.arrival(0, "b", 7, 180)
        (record,) = tracker.records()
        assert [e.participant for e in record.entries] == ["b", "a"]
        assert record.entry("a").t_arrival == 200

    def test_only_first_winner_kept(self):
        tracker = RaceTracker()
        tracker.open(0, 100, "main")
        tracker.arrival(0, "a", 5, 200)
        tracker.arrival(0, "b", 5, 210)
        tracker.win(0, "a")
        tracker.win(0, "b")
        assert tracker.records()[0].winner == "a"

    def test_unknown_race_ignored(self):
        tracker = RaceTracker()
        assert not tracker.arrival(9, "a", 5, 200)
        tracker.win(9, "a")
        assert tracker.records() == []

    def test_open_twice_raises(self):
        tracker = RaceTracker()
        tracker.open(0, 0, "main")
        with pytest.raises(AuditError):
            tracker.open(0, 0, "main")

    def test_residuals_and_rows(self):
        record = race(3, {"a": (5, 1020), "b": (7, 1030)}, winner="a")
        assert record.residuals == [15, 23]
        assert record.spread == 8
        assert record.to_rows()[0] == (3, "a", 5, 1000, 1020, 1)


@pytest.mark.unit
class TestJudgeRace:
    """Pairwise epsilon-fairness of single races."""

    def test_fair_within_epsilon(self):
        record = race(0, {"a": (5, 1020), "b": (7, 1030)})
        assert judge_race(record, 8) is Verdict.FAIR
        assert judge_race(record, 7) is Verdict.UNFAIR

    def test_uncontested_raises(self):
        with pytest.raises(AuditError):
            judge_race(race(0, {"a": (5, 1020)}), 10)

    def test_equal_residuals_fair_at_zero(self):
        record = race(0, {"a": (5, 1020), "b": (7, 1022), "c": (9, 1024)})
        assert judge_race(record, 0) is Verdict.FAIR


@pytest.mark.unit
class TestEpsilonDelta:
    """The empirical epsilon(delta) curve."""

    @pytest.fixture
    def records(self):
        # spreads 0, 10, 20, ..., 90
        return [race(i, {"a": (0, 1000), "b": (0, 1000 + 10 * i)}) for i in range(10)]

    def test_quantiles_are_observed_spreads(self, records):
        curve = estimate_epsilon_delta(records, deltas=(0.5, 0.9, 1.0))
        assert curve.points == [(0.5, 40), (0.9, 80), (1.0, 90)]
        assert curve.max_spread == 90

    def test_delta_at_inverts_epsilon(self, records):
        curve = estimate_epsilon_delta(records)
        assert curve.delta_at(40) == 0.5
        assert curve.delta_at(90) == 1.0
        assert curve.delta_at(-1) == 0.0

    def test_curve_is_nondecreasing(self, records):
        curve = estimate_epsilon_delta(records, deltas=(0.999, 0.1, 0.5, 0.75))
        epsilons = [e for _, e in curve.points]
        assert epsilons == sorted(epsilons)

    def test_l_hat_is_lower_median_residual(self, records):
        curve = estimate_epsilon_delta(records)
        # residuals: ten zeros and 0, 10, ..., 90
        assert curve.l_hat == 0

    def test_ecdf_ends_at_one(self, records):
        ecdf = estimate_epsilon_delta(records).ecdf()
        assert ecdf[-1].fraction == 1.0
        assert [p.spread for p in ecdf] == list(range(0, 100, 10))

    def test_uncontested_races_skipped(self, records):
        curve = estimate_epsilon_delta(records + [race(99, {"a": (0, 5000)})])
        assert curve.races == 10

    def test_no_contested_races_raises(self):
        with pytest.raises(AuditError):
            estimate_epsilon_delta([race(0, {"a": (0, 0)})])

    @pytest.mark.parametrize("delta", [0.0, 1.5])
    def test_delta_out_of_range(self, records, delta):
        with pytest.raises(AuditError):
            estimate_epsilon_delta(records, deltas=(delta,))


@pytest.mark.unit
class TestVictoryDistribution:
    """Head-to-head win statistics."""

    def test_faster_win_rate(self):
        records = [race(i, {"fast": (5, 1100), "slow": (7, 1120)}, winner="fast") for i in range(3)]
        records.append(race(3, {"fast": (5, 1200), "slow": (7, 1110)}, winner="slow"))
        stats = victory_distribution(records, epsilon=5)
        pair = stats[("fast", "slow")]
        assert pair.races == 4
        assert pair.faster == "fast"
        assert pair.faster_win_rate == 0.75
        assert pair.sub_epsilon
        assert pair.sub_epsilon_faster_win_rate == 0.75

    def test_races_won_by_a_third_party_excluded(self):
        records = [race(0, {"a": (5, 1100), "b": (5, 1100), "c": (1, 1050)}, winner="c")]
        stats = victory_distribution(records, epsilon=0)
        assert ("a", "b") not in stats
        assert stats[("a", "c")].races == 1

    def test_equal_reaction_times_get_chi_square(self):
        records = [
            race(i, {"a": (5, 1100), "b": (5, 1100)}, winner="a" if i % 2 else "b")
            for i in range(20)
        ]
        pair = victory_distribution(records, epsilon=10)[("a", "b")]
        assert pair.faster is None
        assert pair.chi2 == pytest.approx(0.0)
        assert pair.p_value == pytest.approx(1.0)

    def test_empty_input_raises(self):
        with pytest.raises(AuditError):
            victory_distribution([], epsilon=0)


@pytest.mark.unit
class TestRequirements:
    """Req. 1-3 checks over the audit trail."""

    def test_delivery_spread_per_update(self):
        deliveries = [
            Delivery(1, "a", 0, 100), Delivery(1, "b", 0, 400),
            Delivery(2, "a", 0, 1000), Delivery(2, "b", 0, 1100),
        ]
        assert max_delivery_spread(deliveries) == 300
        assert max_delivery_spread([]) == 0

    def test_submission_inversion_counted(self):
        submissions = [
            Submission(0, "a", "main", t_send=100, t_arrival=500),
            Submission(0, "b", "main", t_send=200, t_arrival=400),
            Submission(1, "a", "main", t_send=100, t_arrival=400),
            Submission(1, "b", "main", t_send=200, t_arrival=500),
        ]
        assert submission_order_violations(submissions) == 1

    def test_remote_participants_not_compared(self):
        submissions = [
            Submission(0, "a", "main", 100, 500),
            Submission(0, "b", "main", 200, 400, colocated=False),
        ]
        assert submission_order_violations(submissions) == 0

    def test_priority_skip_detected(self):
        fills = [("main", trade(100, 1)), ("main", trade(100, 5)), ("main", trade(100, 3))]
        assert priority_violations(fills) == 1

    def test_different_levels_independent(self):
        fills = [("main", trade(100, 5)), ("main", trade(101, 1)), ("other", trade(100, 2))]
        assert priority_violations(fills) == 0

    def test_check_requirements_combines_all_three(self):
        trail = AuditTrail(
            deliveries=[Delivery(1, "a", 0, 100), Delivery(1, "b", 0, 250)],
            submissions=[
                Submission(0, "a", "main", t_send=100, t_arrival=500),
                Submission(0, "b", "main", t_send=200, t_arrival=400),
            ],
            fills=[("main", trade(100, 4)), ("main", trade(100, 2))],
        )
        check = check_requirements(trail)
        assert check.req1_max_spread == 150
        assert check.req2_violations == 1
        assert check.req3_violations == 1


@pytest.mark.unit
class TestFairnessReport:
    """Building and serializing the report."""

    def test_build_report(self):
        records = [race(i, {"fast": (5, 1100), "slow": (7, 1120)}, winner="fast") for i in range(4)]
        records.append(race(4, {"fast": (5, 1100)}))
        trail = AuditTrail()
        trail.drop("reassembly timeout")
        report = build_report(records, trail, epsilon=10, deltas=(0.5, 0.99), scenario="s", seed=3)
        assert report.races == 4
        assert report.uncontested_races == 1
        assert report.epsilon(0.99) == 18
        assert report.delta_at_audit_epsilon == 0.0
        assert report.pair("slow", "fast").faster_win_rate == 1.0
        assert report.dropped_messages == {"reassembly timeout": 1}

    def test_no_contested_races(self):
        report = build_report([race(0, {"a": (5, 1100)})], AuditTrail(), epsilon=0)
        assert report.l_hat is None
        assert report.epsilon_of_delta == []

    def test_json_round_trip_is_stable(self, tmp_path):
        records = [race(i, {"a": (5, 1100), "b": (7, 1120)}, winner="a") for i in range(3)]
        report = build_report(records, AuditTrail(), epsilon=10, scenario="s")
        path = report.write(tmp_path / "fairness.json")
        loaded = FairnessReport.load(path)
        assert loaded == report
        assert loaded.to_json() == path.read_text(encoding="utf-8")
