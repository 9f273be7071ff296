import math

import pytest

from affground import affordance_energy, ingest, import_flat, merge, validate
from affground.errors import IngestError, RangeError
from affground.ingest import (
    ObjectScoreRow,
    PropertyScoreRow,
    kb_to_rows,
    read_flat,
    read_stage1,
    read_stage2,
)


def stage_fixture():
    props = [f"p{i}" for i in range(10)]
    stage1 = [PropertyScoreRow("pour", p, 0.1 * (i + 1) - 0.05) for i, p in enumerate(props)]
    stage2 = [
        ObjectScoreRow(p, o, w)
        for p in props
        for o, w in (("cup", 0.9), ("bottle", 0.4), ("rock", 0.2))
    ]
    return stage1, stage2


class TestIngest:
    def test_edge_counts(self):
        stage1, stage2 = stage_fixture()
        kb = ingest(stage1, stage2, prune_epsilon=0.0)
        assert kb.version == 1
        assert len(kb.vp_edges) == 10
        assert len(kb.po_edges) == 30
        assert kb.verbs == {"pour"}

    def test_prune_epsilon_drops_low_edges(self):
        stage1, stage2 = stage_fixture()
        kb = ingest(stage1, stage2, prune_epsilon=0.5)
        # stage1 weights 0.05..0.95: exactly 5 exceed 0.5
        assert len(kb.vp_edges) == 5
        # stage2: only the 0.9 po edges survive
        assert len(kb.po_edges) == 10
        assert all(w > 0.5 for w in kb.vp_edges.values())

    def test_verbs_survive_even_if_fully_pruned(self):
        kb = ingest([PropertyScoreRow("cut", "sharp", 0.1)], [], prune_epsilon=0.5)
        assert kb.verbs == {"cut"}
        assert kb.vp_edges == {}

    def test_duplicate_rows_error(self):
        rows = [PropertyScoreRow("cut", "sharp", 0.5), PropertyScoreRow("cut", "sharp", 0.6)]
        with pytest.raises(IngestError, match="duplicate"):
            ingest(rows, [])

    def test_out_of_range_weight_names_row(self):
        with pytest.raises(RangeError, match="row 2"):
            ingest(
                [PropertyScoreRow("cut", "sharp", 0.5), PropertyScoreRow("cut", "blade", 1.2)],
                [],
            )

    def test_ingested_kb_validates(self):
        stage1, stage2 = stage_fixture()
        assert validate(ingest(stage1, stage2)) == []

    def test_roundtrip_through_rows(self):
        stage1, stage2 = stage_fixture()
        kb = ingest(stage1, stage2)
        s1, s2 = kb_to_rows(kb)
        assert ingest(s1, s2) == kb


class TestImportFlat:
    def test_full_weight_pair(self):
        kb = import_flat([("cut", "scissors", 1.0)])
        assert affordance_energy(kb, "cut", "scissors") == pytest.approx(
            -0.9640275801, abs=1e-9
        )

    def test_zero_weight_pair_kept(self):
        kb = import_flat([("cut", "scissors", 0.0)])
        assert ("direct_cut", "scissors") in kb.po_edges
        assert affordance_energy(kb, "cut", "scissors") == pytest.approx(
            -0.7615941560, abs=1e-9
        )

    def test_empty_list(self):
        kb = import_flat([])
        assert validate(kb) == []
        assert not kb.verbs


class TestMerge:
    def test_disjoint_union(self):
        a = import_flat([("cut", "knife", 0.8)])
        b = import_flat([("write", "pen", 0.9)])
        merged = merge(a, b)
        assert merged.verbs == {"cut", "write"}
        assert len(merged.po_edges) == 2

    def test_conflict_policies(self):
        a = import_flat([("cut", "knife", 0.4)])
        b = import_flat([("cut", "knife", 0.8)])
        key = ("direct_cut", "knife")
        assert merge(a, b, "max").po_edges[key] == 0.8
        assert merge(a, b, "mean").po_edges[key] == pytest.approx(0.6)
        assert merge(a, b, "prefer_b").po_edges[key] == 0.8
        assert merge(b, a, "prefer_b").po_edges[key] == 0.4

    def test_commutative_up_to_version(self):
        a = import_flat([("cut", "knife", 0.4), ("cut", "saw", 0.7)])
        b = import_flat([("cut", "knife", 0.8), ("write", "pen", 0.5)])
        for policy in ("max", "mean"):
            ab = merge(a, b, policy)
            ba = merge(b, a, policy)
            assert ab.vp_edges == ba.vp_edges
            assert ab.po_edges == ba.po_edges

    def test_version_is_max_plus_one(self):
        a = import_flat([("cut", "knife", 0.4)])
        assert merge(a, a).version == 2


class TestTables:
    def test_read_stage1(self):
        rows = read_stage1("verb,property,weight\ncut,sharp,0.9\n")
        assert rows == [PropertyScoreRow("cut", "sharp", 0.9)]

    def test_read_stage2(self):
        rows = read_stage2("property,object,weight\nsharp,knife,0.8\n")
        assert rows == [ObjectScoreRow("sharp", "knife", 0.8)]

    def test_read_flat(self):
        assert read_flat("verb,object,weight\ncut,knife,0.7\n") == [("cut", "knife", 0.7)]

    def test_bad_header(self):
        with pytest.raises(IngestError, match="header"):
            read_stage1("a,b,c\nx,y,0.5\n")

    def test_bad_weight_cell(self):
        with pytest.raises(IngestError, match="line 2"):
            read_stage1("verb,property,weight\ncut,sharp,lots\n")
