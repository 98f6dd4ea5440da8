import numpy as np
import pytest

import tiersim as ts
from tiersim.errors import ConfigError, TraceFormatError
from tiersim.memmodel import CACHELINE, READ_MISS, WRITEBACK, LlcFilter
from tiersim.workloads import (OP_READ, OP_WRITE, WorkloadSpec, chase_cycle,
                               gen_chase, parse_workload_spec,
                               scan_epoch_demand, zipf_pmf)

from conftest import MiB


# ---------------------------------------------------------------------------
# chase
# ---------------------------------------------------------------------------

def test_two_line_buffer_is_unique_cycle():
    for seed in range(5):
        order = chase_cycle(2, seed)
        assert order.tolist() == [0, 1]


def test_chase_lap_visits_every_line_once():
    spec = WorkloadSpec(kind="chase", buffer_bytes=256 * CACHELINE, epochs=1, seed=4)
    batch = ts.generate(spec).epoch(0)
    lines = (batch.addrs // CACHELINE).tolist()
    assert sorted(lines) == list(range(256))
    assert all(op == OP_READ for op in batch.ops.tolist())


def test_chase_no_self_loop():
    for seed in range(10):
        order = chase_cycle(16, seed).tolist()
        hops = list(zip(order, order[1:] + order[:1]))
        assert all(a != b for a, b in hops)


def test_chase_wb_updates_second_8_bytes():
    spec = WorkloadSpec(kind="chase_wb", buffer_bytes=8 * CACHELINE, epochs=1, seed=0)
    batch = ts.generate(spec).epoch(0)
    assert batch.ops.tolist() == [OP_READ, OP_WRITE] * 8
    assert np.array_equal(batch.addrs[1::2], batch.addrs[0::2] + 8)


def test_chase_buffer_too_small():
    with pytest.raises(ConfigError):
        gen_chase(WorkloadSpec(kind="chase", buffer_bytes=CACHELINE))


def test_generators_are_deterministic():
    for kind in ("chase", "scan_wb", "phased"):
        spec = WorkloadSpec(kind=kind, buffer_bytes=64 * 4096, epochs=2, seed=9,
                            workers=2 if kind == "scan_wb" else 1,
                            events_per_epoch=500)
        a = ts.generate(spec)
        b = ts.generate(spec)
        for ba, bb in zip(a.epochs(), b.epochs()):
            assert np.array_equal(ba.addrs, bb.addrs)
            assert np.array_equal(ba.ops, bb.ops)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def test_single_line_scan_is_one_event():
    spec = WorkloadSpec(kind="scan", buffer_bytes=CACHELINE, workers=1, epochs=1)
    batch = ts.generate(spec).epoch(0)
    assert len(batch) == 1
    assert batch.addrs[0] == 0 and batch.ops[0] == OP_READ


def test_scan_ascending_and_disjoint():
    spec = WorkloadSpec(kind="scan", buffer_bytes=8 * CACHELINE, workers=3, epochs=1)
    batch = ts.generate(spec).epoch(0)
    ranges = []
    for w in range(3):
        addrs = batch.addrs[batch.workers == w]
        assert np.all(np.diff(addrs) > 0)  # strictly ascending per pass
        ranges.append((addrs.min(), addrs.max()))
        assert addrs.min() >= w * spec.buffer_bytes
        assert addrs.max() < (w + 1) * spec.buffer_bytes
    # round-robin interleave: worker of event e is e mod workers
    assert batch.workers.tolist() == [0, 1, 2] * 8


def test_scan_aggregate_matches_streamed_small_instance():
    # divisibility-friendly instance: buffer lines spread evenly over sets
    cache = ts.CacheConfig(llc_capacity=64 * CACHELINE, associativity=4)
    llc_lines = 64
    spec = WorkloadSpec(kind="scan_wb", buffer_bytes=128 * CACHELINE, workers=2,
                        epochs=3, seed=0)
    f = LlcFilter(cache)
    for e, batch in enumerate(ts.generate(spec).epochs()):
        _, kinds, counts = f.filter_arrays(batch.ops, batch.addrs)
        reads = int(counts[kinds == READ_MISS].sum())
        wbs = int(counts[kinds == WRITEBACK].sum())
        agg_reads, agg_wbs = scan_epoch_demand(spec, llc_lines, e)
        assert (reads, wbs) == (agg_reads, agg_wbs)


def test_scan_aggregate_requires_llc_overflow():
    spec = WorkloadSpec(kind="scan", buffer_bytes=4 * CACHELINE, workers=1)
    with pytest.raises(ConfigError):
        scan_epoch_demand(spec, llc_lines=1024, epoch_index=0)


# ---------------------------------------------------------------------------
# phased
# ---------------------------------------------------------------------------

def test_phased_hot_fraction_one_is_zipf_over_all_pages():
    n_pages = 64
    spec = WorkloadSpec(kind="phased", buffer_bytes=n_pages * 4096, epochs=1,
                        seed=3, hot_fraction=1.0, zipf_s=1.0,
                        events_per_epoch=30000)
    batch = ts.generate(spec).epoch(0)
    pages = (batch.addrs // 4096)
    assert pages.min() >= 0 and pages.max() < n_pages
    # chi-square against the mixture pmf: 90% Zipf over the (shuffled) hot
    # set + 10% uniform
    from scipy import stats

    rng = np.random.default_rng([3, 1, 0])
    hot_set = rng.choice(n_pages, size=n_pages, replace=False)
    pmf = np.full(n_pages, 0.1 / n_pages)
    pmf[hot_set] += 0.9 * zipf_pmf(n_pages, 1.0)
    observed = np.bincount(pages, minlength=n_pages)
    _, pvalue = stats.chisquare(observed, pmf * len(pages))
    assert pvalue > 0.01


def test_phased_zipf_zero_is_uniform_over_hot_set():
    spec = WorkloadSpec(kind="phased", buffer_bytes=64 * 4096, epochs=1, seed=5,
                        hot_fraction=0.25, zipf_s=0.0, events_per_epoch=20000)
    batch = ts.generate(spec).epoch(0)
    pages = batch.addrs // 4096
    counts = np.bincount(pages, minlength=64)
    hot = np.sort(counts)[-16:]
    # uniform over 16 hot pages at 90% weight: each near 20000 * 0.9 / 16
    assert np.allclose(hot, 20000 * 0.9 / 16, rtol=0.15)


def test_phased_hot_set_changes_between_phases():
    spec = WorkloadSpec(kind="phased", buffer_bytes=256 * 4096, epochs=4, seed=6,
                        phase_length=2, hot_fraction=0.05, events_per_epoch=5000)
    tr = ts.generate(spec)
    top = []
    for e in (0, 2):
        pages = tr.epoch(e).addrs // 4096
        counts = np.bincount(pages, minlength=256)
        top.append(set(np.argsort(counts)[-8:].tolist()))
    assert top[0] != top[1]


def test_phased_read_write_mix():
    spec = WorkloadSpec(kind="phased", buffer_bytes=64 * 4096, epochs=1, seed=7,
                        hot_fraction=1.0, events_per_epoch=30000)
    batch = ts.generate(spec).epoch(0)
    writes = batch.ops.sum()
    assert writes / len(batch) == pytest.approx(1 / 3, rel=0.1)  # 2 reads : 1 write


# ---------------------------------------------------------------------------
# trace files
# ---------------------------------------------------------------------------

def test_empty_file_empty_trace(tmp_path):
    p = tmp_path / "empty.trace"
    p.write_text("")
    tr = ts.load_trace(str(p))
    assert sum(len(b) for b in tr.epochs()) == 0


def test_single_line(tmp_path):
    p = tmp_path / "one.trace"
    p.write_text("R,0,0\n")
    events = list(ts.load_trace(str(p)).events())
    assert events == [ts.AccessEvent(OP_READ, 0, 0)]


def test_text_roundtrip(tmp_path):
    spec = WorkloadSpec(kind="scan", buffer_bytes=16 * CACHELINE, workers=2, epochs=2)
    tr = ts.generate(spec)
    p = tmp_path / "scan.trace"
    ts.save_trace(tr, str(p))
    back = ts.load_trace(str(p))
    assert list(tr.events()) == list(back.events())


def test_binary_roundtrip(tmp_path):
    spec = WorkloadSpec(kind="phased", buffer_bytes=16 * 4096, epochs=2, seed=2,
                        hot_fraction=0.5, events_per_epoch=200)
    tr = ts.generate(spec)
    p = tmp_path / "phased.bin"
    ts.save_trace(tr, str(p))
    back = ts.load_trace(str(p))
    assert list(tr.events()) == list(back.events())


@pytest.mark.parametrize("line", ["X,0,0", "R,zz,0", "R,0", "R,-5,0"])
def test_malformed_lines(tmp_path, line):
    p = tmp_path / "bad.trace"
    p.write_text(line + "\n")
    with pytest.raises(TraceFormatError):
        ts.load_trace(str(p))


def test_address_out_of_ram(tmp_path):
    p = tmp_path / "far.trace"
    p.write_text("R,8192,0\n")
    with pytest.raises(TraceFormatError):
        ts.load_trace(str(p), ram_bytes=4096)


def test_truncated_binary(tmp_path):
    p = tmp_path / "cut.bin"
    p.write_bytes((5).to_bytes(8, "little") + b"\x00" * 10)
    with pytest.raises(TraceFormatError):
        ts.load_trace(str(p))


def test_rechunk_preserves_events():
    spec = WorkloadSpec(kind="scan", buffer_bytes=10 * CACHELINE, workers=1, epochs=1)
    tr = ts.generate(spec)
    re = tr.rechunk(3)
    assert re.n_epochs == 3
    assert list(re.events()) == list(tr.events())


def test_spec_parsing():
    spec = parse_workload_spec("""
        kind = phased
        buffer_bytes = 1MiB
        events_per_epoch = 1000
        zipf_s = 1.2
    """)
    assert spec.kind == "phased"
    assert spec.buffer_bytes == MiB
    assert spec.zipf_s == 1.2
    with pytest.raises(ConfigError):
        parse_workload_spec("kind = phased\nbogus = 1\nbuffer_bytes = 1MiB")
    with pytest.raises(ConfigError):
        parse_workload_spec("buffer_bytes = 1MiB")
