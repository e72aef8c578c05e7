import random

import pytest

from bookprobe.errors import ConfigError
from bookprobe.report import (
    AggregateRow,
    AggregateTable,
    aggregate,
    bucket_by_length,
    export,
    lang_group,
    read_table,
)
from bookprobe.scoring import ScoreRecord


def record(pid="p1", book="bk", lang="en", task="direct_probe", perturbation="standard",
           endpoint="m", correct=None, metric=None):
    return ScoreRecord(
        passage_id=pid, book_id=book, lang=lang, task=task, perturbation=perturbation,
        endpoint_id=endpoint, correct=correct, metric_value=metric,
    )


class TestLangGroup:
    def test_three_way_mapping(self):
        assert lang_group("en") == "english"
        assert {lang_group(code) for code in ("es", "tr", "vi")} == {"official"}
        assert {lang_group(code) for code in ("st", "yo", "tn", "ty", "mai", "mg")} == {"unseen"}

    def test_unknown_is_other(self):
        assert lang_group("fr") == "other"


class TestAggregate:
    def test_accuracy_three_of_four(self):
        records = [record(pid=f"p{i}", correct=(i != 0)) for i in range(4)]
        table = aggregate(records, ["task"])
        (row,) = table.rows
        assert row.n == 4 and row.accuracy == pytest.approx(0.75)
        assert row.mean_metric is None

    def test_mixed_tasks_carry_their_measures(self):
        records = [
            record(pid="a", task="direct_probe", correct=True),
            record(pid="b", task="direct_probe", correct=False),
            record(pid="c", task="prefix_probe", metric=80.0),
            record(pid="d", task="prefix_probe", metric=60.0),
        ]
        table = aggregate(records, ["task"])
        by_task = {row.group[0]: row for row in table.rows}
        assert by_task["direct_probe"].accuracy == pytest.approx(0.5)
        assert by_task["direct_probe"].mean_metric is None
        assert by_task["prefix_probe"].mean_metric == pytest.approx(70.0)
        assert by_task["prefix_probe"].accuracy is None

    def test_lang_group_dimension(self):
        records = [
            record(pid="a", lang="en", correct=True),
            record(pid="b", lang="es", correct=True),
            record(pid="c", lang="yo", correct=False),
        ]
        table = aggregate(records, ["lang_group"])
        assert [row.group[0] for row in table.rows] == ["english", "official", "unseen"]

    def test_rows_sorted_lexicographically(self):
        records = [
            record(pid="a", lang="vi", correct=True),
            record(pid="b", lang="en", correct=True),
            record(pid="c", lang="es", correct=True),
        ]
        table = aggregate(records, ["lang"])
        assert [row.group[0] for row in table.rows] == ["en", "es", "vi"]

    def test_partition_counts_sum_to_total(self):
        rng = random.Random(5)
        records = [
            record(pid=f"p{i}", lang=rng.choice(["en", "es", "yo"]),
                   endpoint=rng.choice(["m1", "m2"]), correct=rng.random() < 0.5)
            for i in range(120)
        ]
        for dims in (["lang"], ["model"], ["model", "lang"], ["lang_group"]):
            table = aggregate(records, dims)
            assert sum(row.n for row in table.rows) == 120

    def test_permutation_invariance(self):
        rng = random.Random(6)
        records = [
            record(pid=f"p{i}", lang=rng.choice(["en", "es"]), correct=bool(i % 3))
            for i in range(40)
        ]
        shuffled = list(records)
        rng.shuffle(shuffled)
        assert aggregate(records, ["lang"]) == aggregate(shuffled, ["lang"])

    def test_unknown_dimension_rejected(self):
        with pytest.raises(ConfigError):
            aggregate([record()], ["flavor"])

    def test_no_empty_groups_emitted(self):
        table = aggregate([record(lang="en", correct=True)], ["lang"])
        assert len(table.rows) == 1


class TestBucketByLength:
    def test_boundaries(self):
        records = [record(pid="a"), record(pid="b"), record(pid="c")]
        counts = {"a": 49, "b": 50, "c": 412}
        buckets = {b.record.passage_id: b.length_bucket for b in bucket_by_length(records, counts)}
        assert buckets == {"a": "0-50", "b": "50-100", "c": "100-400+"}

    def test_aggregation_by_bucket(self):
        records = [record(pid="a", correct=True), record(pid="b", correct=False)]
        bucketed = bucket_by_length(records, {"a": 10, "b": 200})
        table = aggregate(bucketed, ["length_bucket"])
        assert [row.group[0] for row in table.rows] == ["0-50", "100-400+"]


class TestExport:
    def table(self):
        return aggregate(
            [
                record(pid="a", lang="en", correct=True),
                record(pid="b", lang="en", correct=False),
                record(pid="c", lang="es", task="prefix_probe", metric=51.25),
            ],
            ["lang", "task"],
        )

    def test_csv_round_trip(self, tmp_path):
        table = self.table()
        path = export(table, tmp_path / "out.csv", fmt="csv")
        assert read_table(path, ["lang", "task"], fmt="csv") == table

    def test_jsonl_round_trip(self, tmp_path):
        table = self.table()
        path = export(table, tmp_path / "out.jsonl", fmt="jsonl")
        assert read_table(path, ["lang", "task"], fmt="jsonl") == table

    def test_header_always_present(self, tmp_path):
        table = AggregateTable(group_by=("lang",), rows=())
        path = export(table, tmp_path / "empty.csv", fmt="csv")
        content = path.read_text(encoding="utf-8")
        assert content.strip() == "lang,n,accuracy,mean_metric"

    def test_floats_have_four_decimals(self, tmp_path):
        table = AggregateTable(
            group_by=("lang",),
            rows=(AggregateRow(group=("en",), n=3, accuracy=2 / 3, mean_metric=None),),
        )
        path = export(table, tmp_path / "out.csv", fmt="csv")
        assert "0.6667" in path.read_text(encoding="utf-8")

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            export(self.table(), tmp_path / "x.bin", fmt="parquet")
