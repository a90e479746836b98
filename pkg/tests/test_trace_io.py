import io

import pytest
from hypothesis import given, strategies as st

from gemmtap.gemm_model import BlockingConstants, GemmDims, schedule
from gemmtap.synth import TimingModel, synthesize
from gemmtap.trace_io import (
    DcgEvent,
    ProbeConfig,
    ProbeSample,
    TraceParseError,
    create_dcg,
    read_probe_log,
    write_probe_log,
)


class TestReadProbeLog:
    def test_single_row(self):
        assert read_probe_log(b"12,itcopy,38\n") == [ProbeSample(12, "itcopy", 38)]

    def test_empty_file(self):
        assert read_probe_log(b"") == []

    def test_non_monotone_slot(self):
        with pytest.raises(TraceParseError, match="non-monotone slot at row 2"):
            read_probe_log(b"5,itcopy,38\n4,oncopy,40\n")

    def test_unknown_function(self):
        with pytest.raises(TraceParseError, match="unknown function name at row 1"):
            read_probe_log(b"5,memcpy,38\n")

    def test_negative_field(self):
        with pytest.raises(TraceParseError, match="negative field at row 1"):
            read_probe_log(b"5,itcopy,-3\n")

    def test_malformed_row(self):
        with pytest.raises(TraceParseError, match="row 2"):
            read_probe_log(b"5,itcopy,38\n6,oncopy\n")

    def test_non_integer_field(self):
        with pytest.raises(TraceParseError, match="non-integer field at row 1"):
            read_probe_log(b"x,itcopy,38\n")

    def test_equal_slots_allowed(self):
        rows = read_probe_log(b"5,itcopy,38\n5,oncopy,40\n")
        assert [s.func for s in rows] == ["itcopy", "oncopy"]

    def test_roundtrip(self):
        samples = [ProbeSample(0, "itcopy", 30), ProbeSample(4, "kernel", 250)]
        buf = io.BytesIO()
        write_probe_log(samples, buf)
        assert buf.getvalue() == b"0,itcopy,30\n4,kernel,250\n"
        assert read_probe_log(buf.getvalue()) == samples


class TestCreateDcg:
    def test_one_hit_one_miss(self):
        samples = [ProbeSample(10, "itcopy", 30), ProbeSample(11, "oncopy", 300)]
        assert create_dcg(samples, ProbeConfig(hit_threshold=100)) == [
            DcgEvent(10, "itcopy", 30)
        ]

    def test_all_misses(self):
        samples = [ProbeSample(10, "itcopy", 100), ProbeSample(11, "oncopy", 300)]
        assert create_dcg(samples, ProbeConfig(hit_threshold=100)) == []

    def test_zero_noise_trace_equals_marker_sequence(self):
        dims = GemmDims(m=4096, k=27, n=72)
        consts = BlockingConstants()
        samples = synthesize(dims, consts, TimingModel(), seed=3)
        dcg = create_dcg(samples)
        assert [ev.func for ev in dcg] == schedule(dims, consts).marker_sequence()


latency = st.integers(min_value=0, max_value=500)
samples_strategy = st.builds(
    lambda slots, funcs, lats: [
        ProbeSample(slot, func, lat)
        for slot, func, lat in zip(sorted(slots), funcs, lats)
    ],
    slots=st.lists(st.integers(min_value=0, max_value=10_000), min_size=0, max_size=60),
    funcs=st.lists(st.sampled_from(["itcopy", "oncopy", "kernel"]), min_size=60, max_size=60),
    lats=st.lists(latency, min_size=60, max_size=60),
)


class TestCreateDcgProperties:
    @given(samples=samples_strategy, threshold=st.integers(min_value=1, max_value=400))
    def test_output_is_hit_subsequence(self, samples, threshold):
        cfg = ProbeConfig(hit_threshold=threshold)
        dcg = create_dcg(samples, cfg)
        assert all(ev.latency < threshold for ev in dcg)
        # subsequence: same order, drawn from input
        it = iter(samples)
        for ev in dcg:
            while True:
                s = next(it)
                if (s.slot, s.func, s.latency) == (ev.slot, ev.func, ev.latency):
                    break

    @given(samples=samples_strategy, threshold=st.integers(min_value=1, max_value=400))
    def test_idempotent_under_reapplication(self, samples, threshold):
        cfg = ProbeConfig(hit_threshold=threshold)
        once = create_dcg(samples, cfg)
        again = create_dcg(
            [ProbeSample(e.slot, e.func, e.latency) for e in once], cfg
        )
        assert again == once

    @given(
        samples=samples_strategy,
        low=st.integers(min_value=1, max_value=200),
        extra=st.integers(min_value=0, max_value=200),
    )
    def test_monotone_in_threshold(self, samples, low, extra):
        small = {(e.slot, e.func, e.latency) for e in create_dcg(samples, ProbeConfig(low))}
        big = {(e.slot, e.func, e.latency) for e in create_dcg(samples, ProbeConfig(low + extra))}
        assert small <= big
