import unittest
import os
import shutil
import time
import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from votediffuse import OpinionProfile, PairEvent, SubjectSet, apply_step, column_average,\
    borda_ranking, top_k_set, mixing_matrix, is_doubly_stochastic, envelope
from votediffuse.pairs import PairDistribution, PairSchedule, CallbackPairSource, IIDPairSource,\
    sample_iid, next_scripted, connectivity_graph
from votediffuse.subjects import SubjectPolicy, full_subjects, topk_subjects, binomial_subjects,\
    hk_subjects, scripted_subjects
from votediffuse.graphs import AgentGraph, connected_components
from votediffuse.engine import SimulationConfig, run, replay, run_batch, has_converged
from votediffuse.callbacks import Callback, EnvelopeMonitor
from votediffuse.errors import DimensionError, ParameterError, ScheduleExhaustedError,\
    ConfigError, ParseError, CorruptTraceError, PolicyMismatchError, UnknownSuiteError
from votediffuse.files.load_data import parse_schedule, parse_subject_script, load_profile_csv
from votediffuse.files.trace_io import parse_trace, load_trace
from votediffuse.files.config_file import parse_config, load_config
from votediffuse.files.reports import spread_series
from votediffuse.analysis import discussion_graph, pair_graph, consensus_report,\
    verify_component_consensus, conservation_audit, topk_certificate, pair_discussion_sets
from votediffuse.suites import run_suite, thread_cap, THREADS_ENV
from votediffuse.cli import main, EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_VERIFICATION

_TEMP_FILES = ['_temp.trace', '_temp_2.trace', '_temp.npz', '_temp.ini', '_temp.csv',
               '_temp_pairs.txt', '_temp_subjects.txt']
_TEMP_DIR = '_temp_reports'

_MIN_CONFIG = '[simulation]\nm = 2\nn = 1\nmax_steps = 1\n\n[initial]\ngenerator = explicit\n'\
    'rows = 0; 1\n\n[pairs]\nkind = point_mass\npair = 1 2\n\n[subjects]\nkind = full\n'


def _remove_temp():

    for fn in _TEMP_FILES:
        if os.path.exists(fn):
            os.remove(fn)
    if os.path.exists(_TEMP_DIR):
        shutil.rmtree(_TEMP_DIR)


def _two_agent_config(max_steps: int = 1, **kwargs) -> SimulationConfig:

    return SimulationConfig.create(
        m=2, n=1, initial_profile=OpinionProfile([[0.0], [1.0]]),
        pair_source=PairDistribution.point_mass(2, 0, 1), max_steps=max_steps, **kwargs
    )


def _gossip_config(m: int, n: int, seed: int, max_steps: int = 100000,
                   policy: SubjectPolicy = None, **kwargs) -> SimulationConfig:

    return SimulationConfig.create(
        m=m, n=n, initial_generator='gaussian', initial_seed=seed,
        pair_source=PairDistribution.uniform(m),
        subject_policy=policy or SubjectPolicy.full(), max_steps=max_steps, seed=seed,
        **kwargs
    )


class TestOpinionCore(unittest.TestCase):

    def test_profile_validation(self):

        print('UNIT TEST: OpinionProfile validation')
        X = OpinionProfile([[0.0, 1.0], [2.0, 3.0]])
        self.assertEqual(X.shape, (2, 2))
        self.assertEqual(X.agents, 2)
        self.assertEqual(X.candidates, 2)
        with self.assertRaises(ValueError):
            X.scores[0, 0] = 5.0
        with self.assertRaises(ParameterError):
            OpinionProfile([[1.0]])
        with self.assertRaises(ParameterError):
            OpinionProfile([[0.0], [float('nan')]])
        with self.assertRaises(ParameterError):
            OpinionProfile([[0.0], [float('inf')]])

    def test_pair_event(self):

        print('UNIT TEST: PairEvent canonical order')
        self.assertEqual(PairEvent(2, 0), PairEvent(0, 2))
        self.assertEqual(PairEvent(2, 0).one_based(), (1, 3))
        with self.assertRaises(ParameterError):
            PairEvent(1, 1)
        with self.assertRaises(DimensionError):
            PairEvent(0, 3).validate(3)

    def test_apply_step(self):

        print('UNIT TEST: Apply averaging step')
        X = OpinionProfile([[0.0], [1.0]])
        self.assertEqual(apply_step(X, PairEvent(0, 1), SubjectSet({0})),
                         OpinionProfile([[0.5], [0.5]]))
        self.assertEqual(apply_step(X, PairEvent(0, 1), SubjectSet()), X)
        X = OpinionProfile([[4, 0], [0, 2], [7, 7]])
        self.assertEqual(apply_step(X, PairEvent(0, 1), SubjectSet({1})),
                         OpinionProfile([[4, 1], [0, 1], [7, 7]]))
        self.assertEqual(X, OpinionProfile([[4, 0], [0, 2], [7, 7]]))
        with self.assertRaises(DimensionError):
            apply_step(X, PairEvent(0, 3), SubjectSet({0}))
        with self.assertRaises(DimensionError):
            apply_step(X, PairEvent(0, 1), SubjectSet({2}))

    def test_column_average(self):

        print('UNIT TEST: Column average')
        self.assertEqual(list(column_average(OpinionProfile([[0], [1]])).averages), [0.5])
        self.assertEqual(list(column_average(OpinionProfile([[1, 2], [3, 4]])).averages),
                         [2.0, 3.0])
        rng = np.random.Generator(np.random.PCG64(3))
        X0 = OpinionProfile(rng.standard_normal((5, 3)))
        X = X0
        for _ in range(10):
            a, b = rng.choice(5, size=2, replace=False)
            X = apply_step(X, PairEvent(a, b), SubjectSet.from_mask(rng.random(3) < 0.5))
        drift = np.abs(column_average(X).averages - column_average(X0).averages)
        self.assertTrue(np.all(drift <= 1e-12))

    def test_borda_ranking(self):

        print('UNIT TEST: Borda ranking')
        self.assertEqual(list(borda_ranking(np.array([0.2, 0.8, 0.5]))), [1, 2, 0])
        self.assertEqual(list(borda_ranking(np.array([1.0, 1.0, 0.0]))), [0, 1, 2])
        self.assertEqual(list(borda_ranking(np.array([5.0]))), [0])

    def test_top_k_set(self):

        print('UNIT TEST: Top-k set')
        self.assertEqual(top_k_set([3, 1, 2], 2), SubjectSet({0, 2}))
        self.assertEqual(top_k_set([2, 2, 1], 1), SubjectSet({0, 1}))
        self.assertEqual(top_k_set([1, 1, 1], 1), SubjectSet({0, 1, 2}))
        with self.assertRaises(ParameterError):
            top_k_set([1, 2], 0)
        with self.assertRaises(ParameterError):
            top_k_set([1, 2], 3)

    def test_mixing_matrix(self):

        print('UNIT TEST: Mixing matrix')
        W = mixing_matrix(PairEvent(0, 1), SubjectSet({0}), 0, 2)
        self.assertTrue(np.array_equal(W, [[0.5, 0.5], [0.5, 0.5]]))
        W = mixing_matrix(PairEvent(0, 1), SubjectSet({1}), 0, 2)
        self.assertTrue(np.array_equal(W, np.eye(2)))
        W = mixing_matrix(PairEvent(0, 2), SubjectSet({0}), 0, 3)
        self.assertTrue(np.array_equal(W, [[0.5, 0.0, 0.5], [0.0, 1.0, 0.0], [0.5, 0.0, 0.5]]))

    def test_doubly_stochastic_sweep(self):

        print('UNIT TEST: Randomized doubly stochastic checks')
        rng = np.random.Generator(np.random.PCG64(11))
        for _ in range(10000):
            m = int(rng.integers(2, 9))
            n = int(rng.integers(1, 5))
            a, b = rng.choice(m, size=2, replace=False)
            pair = PairEvent(a, b)
            subjects = SubjectSet.from_mask(rng.random(n) < 0.5)
            j = int(rng.integers(0, n))
            W = mixing_matrix(pair, subjects, j, m)
            self.assertTrue(is_doubly_stochastic(W, min_diagonal=0.5))
            X = OpinionProfile(rng.uniform(-1.0, 1.0, (m, n)))
            stepped = apply_step(X, pair, subjects).column(j)
            self.assertTrue(np.max(np.abs(stepped - W @ X.column(j))) <= 1e-15)

    def test_envelope(self):

        print('UNIT TEST: Envelope')
        hi, lo = envelope(OpinionProfile([[0, 5], [2, 1]]))
        self.assertEqual(list(hi), [2.0, 5.0])
        self.assertEqual(list(lo), [0.0, 1.0])
        self.assertFalse(is_doubly_stochastic(np.array([[1.0, 0.5], [0.0, 0.5]])))


class TestProperties(unittest.TestCase):

    @given(st.data())
    @settings(max_examples=200, deadline=None)
    def test_conservation_and_envelope(self, data):

        m = data.draw(st.integers(2, 6))
        n = data.draw(st.integers(1, 4))
        scores = data.draw(arrays(np.float64, (m, n), elements=st.floats(-10.0, 10.0)))
        X0 = OpinionProfile(scores)
        X = X0
        for _ in range(data.draw(st.integers(1, 20))):
            a = data.draw(st.integers(0, m - 1))
            b = data.draw(st.integers(0, m - 1).filter(lambda x: x != a))
            subjects = SubjectSet(data.draw(st.sets(st.integers(0, n - 1))))
            hi, lo = envelope(X)
            X = apply_step(X, PairEvent(a, b), subjects)
            new_hi, new_lo = envelope(X)
            self.assertTrue(np.all(new_hi <= hi))
            self.assertTrue(np.all(new_lo >= lo))
        drift = np.abs(column_average(X).averages - column_average(X0).averages)
        self.assertTrue(np.all(drift <= 1e-12))

    @given(st.integers(2, 8), st.data())
    @settings(max_examples=200, deadline=None)
    def test_matrix_scalar_agreement(self, m, data):

        n = data.draw(st.integers(1, 4))
        scores = data.draw(arrays(np.float64, (m, n), elements=st.floats(-1.0, 1.0)))
        a, b = data.draw(st.lists(st.integers(0, m - 1), min_size=2, max_size=2,
                                  unique=True))
        subjects = SubjectSet(data.draw(st.sets(st.integers(0, n - 1))))
        j = data.draw(st.integers(0, n - 1))
        W = mixing_matrix(PairEvent(a, b), subjects, j, m)
        self.assertTrue(is_doubly_stochastic(W, min_diagonal=0.5))
        X = OpinionProfile(scores)
        stepped = apply_step(X, PairEvent(a, b), subjects).column(j)
        self.assertTrue(np.max(np.abs(stepped - W @ X.column(j))) <= 1e-15)

    @given(arrays(np.float64, st.integers(1, 12), elements=st.floats(-100.0, 100.0)),
           st.data())
    @settings(max_examples=200, deadline=None)
    def test_top_k_and_borda(self, v, data):

        k = data.draw(st.integers(1, len(v)))
        members = top_k_set(v, k)
        self.assertGreaterEqual(len(members), k)
        outside = [v[j] for j in range(len(v)) if j not in members]
        if outside:
            self.assertTrue(min(v[j] for j in members) >= max(outside))
        sigma = borda_ranking(v)
        self.assertEqual(sorted(sigma), list(range(len(v))))
        self.assertTrue(np.all(np.diff(v[sigma]) <= 0.0))

    @given(arrays(np.float64, (2, 5), elements=st.floats(-5.0, 5.0)),
           st.floats(0.0, 10.0))
    @settings(max_examples=100, deadline=None)
    def test_hk_symmetric(self, scores, eps):

        X = OpinionProfile(scores)
        self.assertEqual(hk_subjects(X, PairEvent(0, 1), eps),
                         hk_subjects(OpinionProfile(scores[::-1]), PairEvent(0, 1), eps))

    @given(st.integers(2, 10), st.data())
    @settings(max_examples=100, deadline=None)
    def test_components_order_independent(self, m, data):

        pairs = st.lists(st.integers(0, m - 1), min_size=2, max_size=2, unique=True)
        edges = [PairEvent(*p) for p in data.draw(st.lists(pairs, max_size=15))]
        shuffled = data.draw(st.permutations(edges))
        comps = connected_components(AgentGraph.from_edges(m, edges))
        self.assertEqual(comps, connected_components(AgentGraph.from_edges(m, shuffled)))
        self.assertEqual(sorted(a for c in comps for a in c), list(range(m)))
        graph = AgentGraph.from_edges(m, [PairEvent(c[i], c[i + 1]) for c in comps
                                          for i in range(len(c) - 1)])
        self.assertEqual(connected_components(graph), comps)


class TestPairProcesses(unittest.TestCase):

    def test_distribution_validation(self):

        print('UNIT TEST: PairDistribution validation')
        with self.assertRaises(ParameterError):
            PairDistribution([[0.0, 0.6], [0.6, 0.0]])
        with self.assertRaises(ParameterError):
            PairDistribution([[0.5, 0.5], [0.0, 0.0]])
        with self.assertRaises(ParameterError):
            PairDistribution([[0.0, -0.5], [1.5, 0.0]])
        empty = PairDistribution(np.zeros((3, 3)))
        with self.assertRaises(ParameterError):
            sample_iid(empty, np.random.Generator(np.random.PCG64(0)))

    def test_sample_iid(self):

        print('UNIT TEST: Sample i.i.d. pairs')
        rng = np.random.Generator(np.random.PCG64(0))
        dist = PairDistribution.point_mass(3, 1, 0)
        self.assertTrue(all(sample_iid(dist, rng) == PairEvent(0, 1) for _ in range(100)))
        dist = PairDistribution([[0.0, 1.0], [0.0, 0.0]])
        self.assertTrue(all(sample_iid(dist, rng) == PairEvent(0, 1) for _ in range(100)))
        dist = PairDistribution.uniform(3)
        rng = np.random.Generator(np.random.PCG64(42))
        counts = {}
        for _ in range(30000):
            p = sample_iid(dist, rng)
            counts[p] = counts.get(p, 0) + 1
        self.assertEqual(len(counts), 3)
        for c in counts.values():
            self.assertAlmostEqual(c / 30000, 1 / 3, delta=0.02)
        rng_1 = np.random.Generator(np.random.PCG64(5))
        rng_2 = np.random.Generator(np.random.PCG64(5))
        first = [sample_iid(dist, rng_1) for _ in range(1000)]
        second = [sample_iid(dist, rng_2) for _ in range(1000)]
        self.assertEqual(first, second)
        self.assertEqual(len(set(first)), 3)

    def test_next_scripted(self):

        print('UNIT TEST: Scripted pair schedules')
        cyc = PairSchedule((PairEvent(0, 1), PairEvent(1, 2)), cyclic=True)
        self.assertEqual(next_scripted(cyc, 5), PairEvent(1, 2))
        with self.assertRaises(ScheduleExhaustedError):
            next_scripted(PairSchedule((PairEvent(0, 1),)), 1)
        rr = PairSchedule.round_robin(3)
        self.assertEqual(list(rr.events), [PairEvent(0, 1), PairEvent(1, 2), PairEvent(0, 2)])
        self.assertEqual(next_scripted(rr, 4), PairEvent(1, 2))
        with self.assertRaises(ParameterError):
            PairSchedule((), cyclic=True)
        sweep = PairSchedule.path_sweep(3, burst=2)
        self.assertEqual(len(sweep), 8)
        self.assertEqual(sweep.events[0], sweep.events[1])
        blocks = PairSchedule.blocks([[0, 1], [2, 3, 4]])
        self.assertEqual(len(blocks), 4)

    def test_connectivity_graph(self):

        print('UNIT TEST: Connectivity graph')
        graph = connectivity_graph(PairDistribution.point_mass(3, 0, 1))
        self.assertEqual(graph.edges(), [PairEvent(0, 1)])
        self.assertEqual(connected_components(graph), [(0, 1), (2,)])
        graph = connectivity_graph(PairDistribution.uniform(4))
        self.assertEqual(len(graph.edges()), 6)
        self.assertTrue(graph.is_connected())
        cyc = PairSchedule((PairEvent(0, 1), PairEvent(1, 2)), cyclic=True)
        graph = connectivity_graph(cyc)
        self.assertEqual(graph.edges(), [PairEvent(0, 1), PairEvent(1, 2)])
        self.assertFalse(graph.finite_horizon)
        with self.assertLogs('votediffuse.pairs', 'WARNING'):
            graph = connectivity_graph(PairSchedule((PairEvent(0, 1),)), 3)
        self.assertTrue(graph.finite_horizon)
        self.assertEqual(graph.m, 3)

    def test_callback_source(self):

        print('UNIT TEST: Callback pair source')
        writable = []

        def policy(t, scores):
            writable.append(scores.flags.writeable)
            return (t % 2, 2)

        source = CallbackPairSource(policy)
        config = SimulationConfig.create(
            m=3, n=1, initial_profile=OpinionProfile([[0.0], [1.0], [2.0]]),
            pair_source=source, max_steps=5, convergence_mode='off'
        )
        trace = run(config)
        self.assertEqual(len(trace), 5)
        self.assertFalse(any(writable))
        self.assertEqual(trace.event(1).pair, PairEvent(1, 2))
        with self.assertRaises(ParameterError):
            source.connectivity()
        graph = AgentGraph.from_edges(3, [PairEvent(0, 2), PairEvent(1, 2)])
        self.assertEqual(CallbackPairSource(policy, graph).connectivity(), graph)


class TestSubjectProcesses(unittest.TestCase):

    def test_full_subjects(self):

        print('UNIT TEST: Full subjects')
        self.assertEqual(full_subjects(1), SubjectSet({0}))
        self.assertEqual(full_subjects(3), SubjectSet({0, 1, 2}))
        self.assertEqual(full_subjects(10), SubjectSet(range(10)))

    def test_topk_subjects(self):

        print('UNIT TEST: Top-k subjects')
        X = OpinionProfile([[3, 1, 2], [3, 1, 2]])
        self.assertEqual(topk_subjects(X, PairEvent(0, 1), 2), top_k_set([3, 1, 2], 2))
        X = OpinionProfile([[3, 1, 2], [1, 3, 2]])
        self.assertEqual(topk_subjects(X, PairEvent(0, 1), 1), SubjectSet({0, 1}))
        X = OpinionProfile([[2, 2], [0, 5]])
        self.assertEqual(topk_subjects(X, PairEvent(0, 1), 1), SubjectSet({0, 1}))

    def test_binomial_subjects(self):

        print('UNIT TEST: Binomial subjects')
        rng = np.random.Generator(np.random.PCG64(1))
        self.assertEqual(binomial_subjects(7, 1.0, rng), SubjectSet(range(7)))
        frac = len(binomial_subjects(10000, 0.5, rng)) / 10000
        self.assertTrue(0.47 <= frac <= 0.53)
        hits = sum(len(binomial_subjects(1, 0.3, rng)) for _ in range(10000))
        self.assertAlmostEqual(hits / 10000, 0.3, delta=0.02)
        with self.assertRaises(ParameterError) as ctx:
            binomial_subjects(3, 0.0, rng)
        self.assertEqual(str(ctx.exception), 'p must be in (0,1]')

    def test_hk_subjects(self):

        print('UNIT TEST: Bounded-confidence subjects')
        X = OpinionProfile([[0.0], [1.0]])
        self.assertEqual(hk_subjects(X, PairEvent(0, 1), 0.5), SubjectSet())
        self.assertEqual(hk_subjects(X, PairEvent(0, 1), 1.0), SubjectSet({0}))
        X = OpinionProfile([[0.3, 2.0, -1.0], [0.3, 2.0, -1.0]])
        self.assertEqual(hk_subjects(X, PairEvent(0, 1), 0.0), SubjectSet({0, 1, 2}))
        with self.assertLogs('votediffuse.subjects', 'WARNING'):
            SubjectPolicy.hk(0.0)

    def test_policies(self):

        print('UNIT TEST: Subject policies')
        with self.assertRaises(ParameterError):
            SubjectPolicy.top_k(0)
        with self.assertRaises(ParameterError):
            SubjectPolicy.binomial(1.5)
        with self.assertRaises(ParameterError):
            SubjectPolicy.hk(-0.1)
        with self.assertRaises(ParameterError):
            SubjectPolicy.top_k(4).validate(3)
        script = [SubjectSet({0}), SubjectSet()]
        self.assertEqual(scripted_subjects(script, 3, cyclic=True), SubjectSet())
        with self.assertRaises(ScheduleExhaustedError):
            scripted_subjects(script, 2)
        self.assertEqual(SubjectPolicy.top_k(2).default_convergence_mode, 'quiescence')
        self.assertEqual(SubjectPolicy.binomial(0.5).default_convergence_mode, 'consensus')

    def test_mask_selectors(self):

        print('UNIT TEST: Mask selectors agree with select')
        m, n = 6, 5
        scores = np.random.Generator(np.random.PCG64(13)).standard_normal((m, n))
        scores[2, 1] = scores[3, 1]
        self.assertIsNone(SubjectPolicy.full().mask_selector(n, None))
        policies = (SubjectPolicy.top_k(1), SubjectPolicy.top_k(3), SubjectPolicy.top_k(n),
                    SubjectPolicy.binomial(0.5), SubjectPolicy.hk(0.8),
                    SubjectPolicy.scripted([[0], [], [1, 4]], cyclic=True))
        for policy in policies:
            rng_1 = np.random.Generator(np.random.PCG64(21))
            rng_2 = np.random.Generator(np.random.PCG64(21))
            selector = policy.mask_selector(n, rng_1)
            for t in range(50):
                a, b = t % m, (t + 1 + t // m) % m
                if a == b:
                    continue
                pair = PairEvent(a, b)
                mask = selector(scores, pair.a, pair.b, t)
                self.assertEqual(mask.shape, (n,))
                self.assertEqual(SubjectSet.from_mask(mask),
                                 policy.select(scores, pair, t, rng_2))
        selector = SubjectPolicy.scripted([[0]]).mask_selector(n, None)
        self.assertTrue(selector(scores, 0, 1, 0)[0])
        with self.assertRaises(ScheduleExhaustedError):
            selector(scores, 0, 1, 1)

    def test_full_keeps_equal_columns(self):

        print('UNIT TEST: Equal columns stay equal under full subjects')
        rng = np.random.Generator(np.random.PCG64(9))
        col = rng.standard_normal((6, 1))
        config = SimulationConfig.create(
            m=6, n=2, initial_profile=OpinionProfile(np.hstack([col, col])),
            pair_source=PairDistribution.uniform(6), max_steps=2000, seed=9,
            snapshot_every=100
        )
        trace = run(config)
        for snap in trace.snapshots.values():
            self.assertTrue(np.array_equal(snap.column(0), snap.column(1)))


class TestEngine(unittest.TestCase):

    def test_single_step(self):

        print('UNIT TEST: Single engine step')
        trace = run(_two_agent_config(1))
        self.assertEqual(trace.final_profile, OpinionProfile([[0.5], [0.5]]))
        self.assertEqual(trace.stopped_at, 1)
        self.assertEqual(replay(trace), OpinionProfile([[0.5], [0.5]]))
        trace = run(_two_agent_config(60, snapshot_every=1, convergence_mode='off'))
        for step, snap in trace.snapshots.items():
            if step >= 1:
                self.assertEqual(snap.scores[0, 0], snap.scores[1, 0])
        self.assertEqual(trace.stop_reason, 'max_steps')

    def test_gossip_converges_to_mean(self):

        print('UNIT TEST: Gossip on K_4 converges to the initial mean')
        config = SimulationConfig.create(
            m=4, n=1, initial_generator='uniform', initial_seed=7,
            pair_source=PairDistribution.uniform(4), max_steps=100000, seed=7
        )
        trace = run(config)
        xbar = column_average(trace.initial_profile).averages
        self.assertTrue(np.max(np.abs(trace.final_profile.scores - xbar)) <= 1e-10)
        self.assertEqual(trace.stop_reason, 'converged')
        self.assertEqual(replay(trace), trace.final_profile)

    def test_has_converged(self):

        print('UNIT TEST: Convergence predicate')
        X = OpinionProfile([[1.0, 2.0], [1.0, 2.0]])
        self.assertTrue(has_converged([X, X], 1e-12))
        self.assertFalse(has_converged([OpinionProfile([[0.0], [1.0]])], 0.5))
        X = OpinionProfile([[0.0], [0.0], [1.0], [1.0]])
        self.assertTrue(has_converged([X], 1e-12, [(0, 1), (2, 3)]))
        Y = OpinionProfile([[0.0], [0.0], [0.5], [0.5]])
        self.assertFalse(has_converged([Y, X], 1e-12, [(0, 1), (2, 3)]))

    def test_stop_reasons(self):

        print('UNIT TEST: Stop reasons')
        schedule = PairSchedule((PairEvent(0, 1), PairEvent(1, 2), PairEvent(0, 2)))
        config = SimulationConfig.create(
            m=3, n=1, initial_generator='uniform', pair_source=schedule, max_steps=10
        )
        trace = run(config)
        self.assertEqual(trace.stop_reason, 'exhausted')
        self.assertEqual(trace.stopped_at, 3)
        self.assertEqual(replay(trace), trace.final_profile)

        class Halt(Callback):
            def on_step_end(self, t, scores):
                return t < 4

        trace = run(_gossip_config(4, 2, 0, convergence_mode='off'), callbacks=[Halt()])
        self.assertEqual(trace.stop_reason, 'halted')
        self.assertEqual(trace.stopped_at, 5)

    def test_config_validation(self):

        print('UNIT TEST: SimulationConfig validation')
        with self.assertRaises(ConfigError) as ctx:
            _two_agent_config(0)
        self.assertEqual(ctx.exception.field, 'max_steps')
        with self.assertRaises(ConfigError) as ctx:
            _two_agent_config(1, convergence_tol=0.0)
        self.assertEqual(ctx.exception.field, 'convergence_tol')
        with self.assertRaises(ConfigError):
            _two_agent_config(1, snapshot_every=0)
        with self.assertRaises(ConfigError):
            SimulationConfig.create(m=3, n=1, initial_profile=OpinionProfile([[0.0], [1.0]]),
                                    pair_source=PairDistribution.uniform(3), max_steps=1)
        with self.assertRaises(ConfigError):
            SimulationConfig.create(m=2, n=2, initial_generator='uniform',
                                    pair_source=PairDistribution.uniform(2),
                                    subject_policy=SubjectPolicy.top_k(3), max_steps=1)
        with self.assertRaises(ConfigError):
            _two_agent_config(1, seed=2 ** 64)

    def test_determinism(self):

        print('UNIT TEST: Determinism and replay')
        config = _gossip_config(5, 3, 4, 3000, SubjectPolicy.binomial(0.4))
        first, second = run(config), run(config)
        self.assertTrue(np.array_equal(first.pairs, second.pairs))
        self.assertTrue(np.array_equal(first.subject_mask, second.subject_mask))
        self.assertEqual(first.final_profile, second.final_profile)
        self.assertEqual(replay(first), first.final_profile)
        batch = run_batch([config, config], threads=2)
        self.assertEqual(batch[0].final_profile, first.final_profile)
        self.assertEqual(batch[1].final_profile, first.final_profile)

    def test_iid_source_follows_seed(self):

        print('UNIT TEST: I.i.d. source instances are reseeded on every run')
        dist = PairDistribution.uniform(5)
        source = IIDPairSource(dist, np.random.Generator(np.random.PCG64(1)))

        def config(pair_source, seed):
            return SimulationConfig.create(
                m=5, n=2, initial_generator='uniform', initial_seed=0,
                pair_source=pair_source, max_steps=500, seed=seed, convergence_mode='off'
            )

        first, second = run(config(source, 3)), run(config(source, 3))
        self.assertTrue(np.array_equal(first.pairs, second.pairs))
        self.assertEqual(first.final_profile, second.final_profile)
        plain = run(config(dist, 3))
        self.assertTrue(np.array_equal(first.pairs, plain.pairs))
        other = run(config(source, 4))
        self.assertFalse(np.array_equal(first.pairs, other.pairs))
        batch = run_batch([config(source, 3)] * 3, threads=3)
        for trace in batch:
            self.assertTrue(np.array_equal(trace.pairs, first.pairs))
        with self.assertRaises(ConfigError):
            config(IIDPairSource(PairDistribution.uniform(4), None), 3)

    def test_trace_buffer_growth(self):

        print('UNIT TEST: Trace buffers grow with the run')
        trace = run(_gossip_config(4, 1, 7, 10 ** 9))
        self.assertEqual(trace.stop_reason, 'converged')
        self.assertLess(trace.stopped_at, 65536)
        self.assertEqual(trace.pairs.shape, (trace.stopped_at, 2))
        self.assertEqual(replay(trace), trace.final_profile)
        trace = run(_gossip_config(3, 2, 8, 70000, SubjectPolicy.top_k(1),
                                   convergence_mode='off'))
        self.assertEqual(trace.stop_reason, 'max_steps')
        self.assertEqual(trace.pairs.shape, (70000, 2))
        self.assertEqual(trace.subject_mask.shape, (70000, 2))
        self.assertTrue(trace.subject_mask.any(axis=1).all())
        self.assertEqual(replay(trace), trace.final_profile)

    def test_progress_logging(self):

        print('UNIT TEST: Progress logging')
        with self.assertLogs('votediffuse.callbacks', 'INFO'):
            run(_gossip_config(3, 1, 0, 20, convergence_mode='off'), verbose=10)

    def test_convergence_universality(self):

        print('UNIT TEST: Monotone envelope for every policy and pair source')
        m, n = 8, 5
        sources = (PairDistribution.uniform(m), PairSchedule.round_robin(m),
                   PairSchedule.path_sweep(m, burst=3))
        policies = (SubjectPolicy.full(), SubjectPolicy.top_k(2), SubjectPolicy.binomial(0.5),
                    SubjectPolicy.hk(0.3))
        for source in sources:
            for policy in policies:
                config = SimulationConfig.create(
                    m=m, n=n, initial_generator='uniform', initial_seed=1, pair_source=source,
                    subject_policy=policy, max_steps=20000, seed=1, snapshot_every=20000,
                    convergence_mode='off'
                )
                monitor = EnvelopeMonitor()
                trace = run(config, callbacks=[monitor])
                self.assertTrue(monitor.monotone)
                self.assertLessEqual(monitor.widths[-1], monitor.widths[0])
                self.assertEqual(replay(trace), trace.final_profile)


class TestFiles(unittest.TestCase):

    def test_parse_schedule(self):

        print('UNIT TEST: Parse pair schedules')
        schedule = parse_schedule('cyclic\n1 2\n# comment\n\n2 3\n')
        self.assertTrue(schedule.cyclic)
        self.assertEqual(list(schedule.events), [PairEvent(0, 1), PairEvent(1, 2)])
        with self.assertRaises(ParseError) as ctx:
            parse_schedule('1 2\n1 x\n')
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ParseError):
            parse_schedule('1 1\n')
        with self.assertRaises(ParseError):
            parse_schedule('0 1\n')

    def test_parse_subject_script(self):

        print('UNIT TEST: Parse subject scripts')
        script, cyclic = parse_subject_script('1 2\n\n3\n')
        self.assertFalse(cyclic)
        self.assertEqual(script, [SubjectSet({0, 1}), SubjectSet(), SubjectSet({2})])
        script, cyclic = parse_subject_script('cyclic\n1\n')
        self.assertTrue(cyclic)
        with self.assertRaises(ParseError) as ctx:
            parse_subject_script('1\n2 b\n')
        self.assertEqual(ctx.exception.line, 2)

    def test_profile_csv(self):

        print('UNIT TEST: Load profile CSV')
        with open('_temp.csv', 'w') as csv_file:
            csv_file.write('0.0,1.0\n2.0,3.0\n')
        self.assertEqual(load_profile_csv('_temp.csv'), OpinionProfile([[0, 1], [2, 3]]))

    def test_trace_text_format(self):

        print('UNIT TEST: Trace text format')
        config = _gossip_config(4, 3, 2, 500, SubjectPolicy.top_k(2), snapshot_every=100)
        trace = run(config)
        trace.save('_temp.trace')
        loaded = load_trace('_temp.trace')
        self.assertEqual(loaded.stopped_at, trace.stopped_at)
        self.assertEqual(loaded.stop_reason, trace.stop_reason)
        self.assertEqual(loaded.config, trace.config)
        self.assertTrue(np.array_equal(loaded.pairs, trace.pairs))
        self.assertTrue(np.array_equal(loaded.subject_mask, trace.subject_mask))
        self.assertEqual(sorted(loaded.snapshots), sorted(trace.snapshots))
        self.assertEqual(loaded.final_profile, trace.final_profile)
        self.assertEqual(replay(loaded), trace.final_profile)
        self.assertEqual(loaded.subject_kind, 'top_k')
        with self.assertRaises(ValueError):
            trace.save('_temp.txt')

    def test_trace_npz_format(self):

        print('UNIT TEST: Trace binary format')
        trace = run(_gossip_config(4, 2, 3, 700, SubjectPolicy.hk(0.8)))
        trace.save('_temp.npz')
        loaded = load_trace('_temp.npz')
        self.assertEqual(loaded.config, trace.config)
        self.assertTrue(np.array_equal(loaded.pairs, trace.pairs))
        self.assertTrue(np.array_equal(loaded.subject_mask, trace.subject_mask))
        self.assertEqual(loaded.initial_profile, trace.initial_profile)
        self.assertEqual(loaded.final_profile, trace.final_profile)

    def test_trace_determinism(self):

        print('UNIT TEST: Byte-identical trace files')
        config = _gossip_config(6, 2, 8, 2000, SubjectPolicy.binomial(0.5))
        run(config).save('_temp.trace')
        run(config).save('_temp_2.trace')
        with open('_temp.trace', 'rb') as f1, open('_temp_2.trace', 'rb') as f2:
            self.assertEqual(f1.read(), f2.read())

    def test_corrupt_trace(self):

        print('UNIT TEST: Corrupt trace files')
        text = 'votediffuse-trace 1\n[header]\nm=2\nn=1\nsubjects.kind=full\nstopped_at=1\n'\
            'stop_reason=max_steps\n[events]\n{}\n[snapshot 0]\n0.0\n1.0\n[snapshot 1]\n0.5\n'\
            '0.5\n[end]\n'
        trace = parse_trace(text.format('0 1 2 1 1'))
        self.assertEqual(replay(trace), OpinionProfile([[0.5], [0.5]]))
        with self.assertRaises(CorruptTraceError) as ctx:
            parse_trace(text.format('0 1 3 1 1'))
        self.assertEqual(ctx.exception.line, 9)
        with self.assertRaises(CorruptTraceError) as ctx:
            parse_trace(text.format('0 1 2 1 2'))
        self.assertEqual(ctx.exception.line, 9)
        with self.assertRaises(ParseError) as ctx:
            parse_trace(text.format('0 1 two 1 1'))
        self.assertEqual(ctx.exception.line, 9)
        with self.assertRaises(ParseError) as ctx:
            parse_trace('not a trace\n')
        self.assertEqual(ctx.exception.line, 1)

    def test_config_file(self):

        print('UNIT TEST: Config files')
        config = parse_config(_MIN_CONFIG)
        self.assertEqual(run(config).final_profile, OpinionProfile([[0.5], [0.5]]))
        self.assertEqual(parse_config(_MIN_CONFIG, seed=12).seed, 12)
        bad = _MIN_CONFIG.replace('kind = full', 'kind = binomial\np = 0')
        with self.assertRaises(ConfigError) as ctx:
            parse_config(bad)
        self.assertEqual(ctx.exception.field, 'subjects.p')
        self.assertIn('p must be in (0,1]', str(ctx.exception))
        with self.assertRaises(ConfigError) as ctx:
            parse_config(_MIN_CONFIG.replace('max_steps = 1', 'max_steps = 0'))
        self.assertEqual(ctx.exception.field, 'simulation.max_steps')
        with self.assertRaises(ConfigError):
            parse_config(_MIN_CONFIG.replace('kind = full', 'kind = top_k'))
        with self.assertRaises(ConfigError):
            parse_config(_MIN_CONFIG + '\n[extra]\nx = 1\n')
        with self.assertRaises(ParseError):
            parse_config('m = 2\n')

    def test_config_file_scripts(self):

        print('UNIT TEST: Config files with schedule and subject scripts')
        with open('_temp_pairs.txt', 'w') as f:
            f.write('cyclic\n1 2\n2 3\n')
        with open('_temp_subjects.txt', 'w') as f:
            f.write('1\n2\n\n')
        with open('_temp.ini', 'w') as f:
            f.write('[simulation]\nm = 3\nn = 2\nmax_steps = 10\n\n[pairs]\nkind = schedule\n'
                    'schedule = _temp_pairs.txt\n\n[subjects]\nkind = scripted\n'
                    'script = _temp_subjects.txt\n')
        trace = run(load_config('_temp.ini'))
        self.assertEqual(trace.stop_reason, 'exhausted')
        self.assertEqual(trace.stopped_at, 3)
        self.assertEqual(trace.event(1).subjects, SubjectSet({1}))
        self.assertEqual(trace.event(2).subjects, SubjectSet())

    def tearDown(self):

        _remove_temp()


class TestAnalysis(unittest.TestCase):

    def test_discussion_graph(self):

        print('UNIT TEST: Discussion graph')
        config = SimulationConfig.create(
            m=3, n=2, initial_generator='uniform',
            pair_source=PairSchedule((PairEvent(0, 1),), cyclic=True),
            subject_policy=SubjectPolicy.scripted([[0]], cyclic=True), max_steps=50,
            convergence_mode='off'
        )
        trace = run(config)
        graph = discussion_graph(trace, 0, 10)
        self.assertEqual(graph.edges(), [PairEvent(0, 1)])
        self.assertEqual(graph.counts[PairEvent(0, 1)], 50)
        self.assertEqual(discussion_graph(trace, 1, 10).edges(), [])
        self.assertEqual(discussion_graph(trace, 0, 51).edges(), [])
        with self.assertRaises(DimensionError):
            discussion_graph(trace, 2, 10)
        trace = run(_gossip_config(5, 3, 1, 2000, convergence_mode='off'))
        for j in range(3):
            self.assertEqual(discussion_graph(trace, j, 10).edges(), pair_graph(trace, 10).edges())

    def test_connected_components(self):

        print('UNIT TEST: Connected components')
        graph = AgentGraph.from_edges(4, [PairEvent(0, 1), PairEvent(1, 2)])
        self.assertEqual(connected_components(graph), [(0, 1, 2), (3,)])
        self.assertEqual(connected_components(AgentGraph(4)), [(0,), (1,), (2,), (3,)])
        self.assertEqual(connected_components(connectivity_graph(PairDistribution.uniform(5))),
                         [(0, 1, 2, 3, 4)])

    def test_consensus_report(self):

        print('UNIT TEST: Consensus report')
        report = consensus_report(OpinionProfile([[1.0, 2.0], [1.0, 2.0]]), 1e-9)
        self.assertTrue(report.is_society_consensus(0))
        self.assertTrue(report.is_society_consensus(1))
        report = consensus_report(OpinionProfile([[0.0], [0.0], [1.0]]), 1e-9)
        self.assertEqual([c.members for c in report.classes_for(0)], [(0, 1), (2,)])
        self.assertEqual([c.value for c in report.classes_for(0)], [0.0, 1.0])
        self.assertTrue(report.consent(0, 0, 1))
        self.assertFalse(report.consent(0, 1, 2))
        report = consensus_report(OpinionProfile([[0.0], [0.5], [1.0]]), 0.6)
        self.assertEqual([c.members for c in report.classes_for(0)], [(0, 1, 2)])
        report = consensus_report(OpinionProfile([[0.0], [0.5], [1.0]]), 0.5)
        self.assertEqual(len(report.classes_for(0)), 1)
        with self.assertRaises(ParameterError):
            consensus_report(OpinionProfile([[0.0], [1.0]]), 0.0)

    def test_gossip_component_consensus(self):

        print('UNIT TEST: Component consensus on connected gossip')
        trace = run(_gossip_config(6, 2, 3))
        verification = verify_component_consensus(trace, 1e-8, 10)
        self.assertTrue(verification.passed)
        xbar = column_average(trace.initial_profile).averages
        for j in range(2):
            comps = [c for c in verification.checks if c.candidate == j]
            self.assertEqual(len(comps), 1)
            self.assertAlmostEqual(comps[0].value, xbar[j], delta=1e-8)

    def test_two_block_consensus(self):

        print('UNIT TEST: Component consensus on a two-block schedule')
        rng = np.random.Generator(np.random.PCG64(21))
        initial = OpinionProfile(rng.standard_normal((10, 2)))
        blocks = [list(range(5)), list(range(5, 10))]
        config = SimulationConfig.create(
            m=10, n=2, initial_profile=initial, pair_source=PairSchedule.blocks(blocks),
            max_steps=200000
        )
        trace = run(config)
        self.assertEqual(trace.stop_reason, 'converged')
        verification = verify_component_consensus(trace, 1e-8, 10)
        self.assertTrue(verification.passed)
        for j in range(2):
            self.assertEqual(verification.components(j), [tuple(b) for b in blocks])
        for block in blocks:
            oracle = run(SimulationConfig.create(
                m=5, n=2, initial_profile=OpinionProfile(initial.scores[block]),
                pair_source=PairSchedule.round_robin(5), max_steps=200000
            ))
            final = trace.final_profile.scores[block]
            self.assertTrue(np.max(np.abs(final - oracle.final_profile.scores)) <= 1e-8)
            block_mean = column_average(initial.scores[block]).averages
            self.assertTrue(np.max(np.abs(final - block_mean)) <= 1e-8)

    def test_empty_trace(self):

        print('UNIT TEST: Analysis of an empty trace')
        config = SimulationConfig.create(
            m=3, n=2, initial_generator='uniform', pair_source=PairSchedule(()), max_steps=5
        )
        trace = run(config)
        self.assertEqual(len(trace), 0)
        self.assertEqual(replay(trace), trace.initial_profile)
        self.assertEqual(conservation_audit(trace), 0.0)
        verification = verify_component_consensus(trace, 1e-8, 0)
        self.assertTrue(verification.passed)
        self.assertEqual(verification.components(0), [(0,), (1,), (2,)])

    def test_conservation_audit(self):

        print('UNIT TEST: Conservation audit')
        self.assertEqual(conservation_audit(run(_two_agent_config(1))), 0.0)
        trace = run(_gossip_config(5, 3, 6, 100000, convergence_mode='off',
                                   snapshot_every=100000))
        self.assertLessEqual(conservation_audit(trace), 1e-10)

    def test_topk_certificate(self):

        print('UNIT TEST: Top-k certificate')
        with self.assertRaises(PolicyMismatchError):
            topk_certificate(run(_gossip_config(4, 2, 0, 1000)), 1e-8, 10)
        trace = run(_gossip_config(4, 1, 5, 100000, SubjectPolicy.top_k(1)))
        cert = topk_certificate(trace, 1e-8, 10)
        self.assertTrue(cert.applicable)
        self.assertEqual(cert.k_prime, 1)
        xbar = column_average(trace.initial_profile).averages
        self.assertAlmostEqual(cert.top_value, xbar[0], delta=1e-8)

        row = [3.0, 1.0, 2.0]
        config = SimulationConfig.create(
            m=4, n=3, initial_profile=OpinionProfile([row] * 4),
            pair_source=PairDistribution.uniform(4), subject_policy=SubjectPolicy.top_k(2),
            max_steps=5000
        )
        trace = run(config)
        self.assertEqual(trace.final_profile, trace.initial_profile)
        cert = topk_certificate(trace, 1e-8, 10)
        self.assertGreaterEqual(cert.k_prime, 2)
        self.assertTrue(top_k_set(row, 2) <= cert.consensual_candidates)
        self.assertEqual(cert.top_k_prime[:2], [0, 2])
        self.assertEqual(len(cert.pair_discussion_sets), 6)
        self.assertTrue(all(s == SubjectSet({0, 2})
                            for s in cert.pair_discussion_sets.values()))
        self.assertTrue(all(alpha == 2.0 for alpha in cert.pair_alphas.values()))
        self.assertEqual(cert.alpha_spread, 0.0)
        self.assertEqual(cert.alpha_hat, 1.0)
        self.assertEqual(cert.q_set, SubjectSet({0, 1, 2}))
        self.assertTrue(cert.above_alpha_discussed)

    def test_pair_discussion_sets(self):

        print('UNIT TEST: Per-pair discussion sets')
        config = SimulationConfig.create(
            m=3, n=2, initial_profile=OpinionProfile([[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]),
            pair_source=PairSchedule((PairEvent(0, 1), PairEvent(1, 2)), cyclic=True),
            subject_policy=SubjectPolicy.scripted([[0], [0, 1]], cyclic=True),
            max_steps=40, convergence_mode='off'
        )
        trace = run(config)
        self.assertEqual(len(trace), 40)
        expected = {PairEvent(0, 1): SubjectSet({0}), PairEvent(1, 2): SubjectSet({0, 1})}
        self.assertEqual(pair_discussion_sets(trace, 10), expected)
        self.assertEqual(pair_discussion_sets(trace, 20), expected)
        self.assertEqual(pair_discussion_sets(trace, 21), {})
        self.assertEqual(pair_discussion_sets(trace, 0), expected)
        config = SimulationConfig.create(
            m=3, n=2, initial_profile=OpinionProfile([[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]),
            pair_source=PairSchedule((PairEvent(0, 1), PairEvent(0, 1), PairEvent(1, 2))),
            subject_policy=SubjectPolicy.scripted([[1], [], [0]]), max_steps=3,
            convergence_mode='off'
        )
        sets = pair_discussion_sets(run(config), 1)
        self.assertEqual(sets, {PairEvent(0, 1): SubjectSet({1}),
                                PairEvent(1, 2): SubjectSet({0})})
        self.assertEqual(pair_discussion_sets(run(config), 2), {PairEvent(0, 1): SubjectSet()})

    def test_topk_certificate_seed_sweep(self):

        print('UNIT TEST: Top-k certificate over 20 seeds')
        for seed in range(20):
            trace = run(_gossip_config(5, 4, seed, 200000, SubjectPolicy.top_k(2),
                                       convergence_tol=1e-12))
            cert = topk_certificate(trace, 1e-8, 10)
            self.assertTrue(cert.applicable)
            self.assertGreaterEqual(cert.k_prime, 1)
            top = int(cert.aggregate_ranking[0])
            self.assertIn(top, cert.consensual_candidates)
            xbar = column_average(trace.initial_profile).averages
            self.assertAlmostEqual(cert.top_value, xbar[top], delta=1e-8)
            self.assertTrue(set(cert.top_k_prime) <= cert.consensual_candidates)
            self.assertLessEqual(cert.alpha_hat, cert.top_value)
            self.assertTrue(set(cert.top_k_prime) <= cert.q_set)
            self.assertTrue(cert.above_alpha_discussed)

    def test_topk_not_applicable(self):

        print('UNIT TEST: Top-k certificate on a disconnected pair graph')
        config = SimulationConfig.create(
            m=4, n=2, initial_generator='gaussian',
            pair_source=PairDistribution.from_edges(4, [PairEvent(0, 1), PairEvent(2, 3)]),
            subject_policy=SubjectPolicy.top_k(1), max_steps=2000
        )
        with self.assertLogs('votediffuse.analysis.certificates', 'WARNING'):
            cert = topk_certificate(run(config), 1e-8, 10)
        self.assertFalse(cert.applicable)
        self.assertEqual(cert.k_prime, 0)

    def test_spread_series(self):

        print('UNIT TEST: Spread plot data')
        trace = run(_two_agent_config(3, snapshot_every=1, convergence_mode='off'))
        rows = spread_series(trace)
        self.assertEqual(rows[0], [0, 1, 1.0])
        self.assertEqual(rows[-1], [3, 1, 0.0])
        self.assertEqual(len(rows), 4)


class TestSuites(unittest.TestCase):

    def test_conservation_suite(self):

        print('UNIT TEST: Conservation suite')
        result = run_suite('conservation', range(4), threads=2, steps=50000)
        self.assertTrue(result.passed)
        self.assertTrue(all(r.metric <= 1e-10 for r in result.runs))

    def test_conservation_suite_full_length(self):

        print('UNIT TEST: Conservation suite at 10^6 steps')
        start = time.perf_counter()
        result = run_suite('conservation', [0, 1], threads=2)
        print('  elapsed: {:.2f}s'.format(time.perf_counter() - start))
        self.assertTrue(result.passed)
        self.assertEqual([r.detail for r in result.runs], ['drift (full)', 'drift (top_k)'])
        self.assertTrue(all(r.metric <= 1e-10 for r in result.runs))

    def test_gossip_consensus_suite(self):

        print('UNIT TEST: Gossip consensus suite')
        self.assertTrue(run_suite('gossip-consensus', range(10)).passed)

    def test_hk_freeze_suite(self):

        print('UNIT TEST: HK freeze suite')
        result = run_suite('hk-freeze', [0, 1], threads=1)
        self.assertTrue(result.passed)

    def test_disconnected_suite(self):

        print('UNIT TEST: Disconnected suite')
        self.assertTrue(run_suite('disconnected', [0, 1]).passed)

    def test_topk_suite(self):

        print('UNIT TEST: Top-k suite')
        self.assertTrue(run_suite('topk', range(5)).passed)

    def test_unknown_suite(self):

        print('UNIT TEST: Unknown suite')
        with self.assertRaises(UnknownSuiteError):
            run_suite('nope', [0])

    def test_thread_cap(self):

        print('UNIT TEST: Thread cap')
        previous = os.environ.get(THREADS_ENV)
        os.environ[THREADS_ENV] = '2'
        try:
            self.assertEqual(thread_cap(10), 2)
            self.assertEqual(thread_cap(1), 1)
        finally:
            if previous is None:
                del os.environ[THREADS_ENV]
            else:
                os.environ[THREADS_ENV] = previous


class TestCLI(unittest.TestCase):

    def test_simulate_and_analyze(self):

        print('UNIT TEST: CLI simulate + analyze')
        with open('_temp.ini', 'w') as f:
            f.write(_MIN_CONFIG)
        self.assertEqual(main(['simulate', '--config', '_temp.ini', '--out', '_temp.trace']),
                         EXIT_OK)
        self.assertEqual(load_trace('_temp.trace').final_profile,
                         OpinionProfile([[0.5], [0.5]]))
        self.assertEqual(main(['analyze', '_temp.trace', '--out', _TEMP_DIR]), EXIT_OK)
        for suffix in ('.report.txt', '.components.csv', '.classes.csv', '.spread.csv'):
            self.assertTrue(os.path.exists(os.path.join(_TEMP_DIR, '_temp' + suffix)))
        with open(os.path.join(_TEMP_DIR, '_temp.components.csv'), 'r') as f:
            self.assertEqual(f.readline().strip(), 'candidate,component,spread,value,result')

    def test_simulate_errors(self):

        print('UNIT TEST: CLI exit codes')
        with open('_temp.ini', 'w') as f:
            f.write(_MIN_CONFIG.replace('kind = full', 'kind = binomial\np = 0'))
        self.assertEqual(main(['simulate', '--config', '_temp.ini', '--out', '_temp.trace']),
                         EXIT_VALIDATION)
        self.assertEqual(main(['simulate', '--config', '_missing.ini', '--out', '_temp.trace']),
                         EXIT_IO)
        with open('_temp.trace', 'w') as f:
            f.write('votediffuse-trace 1\n[header]\nm=2\n')
        self.assertEqual(main(['analyze', '_temp.trace', '--out', _TEMP_DIR]), EXIT_IO)

    def test_verify(self):

        print('UNIT TEST: CLI verify')
        self.assertEqual(main(['verify', '--suite', 'hk-freeze', '--seeds', '2']), EXIT_OK)
        self.assertEqual(main(['verify', '--suite', 'nope', '--seeds', '2']), EXIT_VALIDATION)
        self.assertEqual(main(['verify', '--suite', 'hk-freeze', '--seeds', '0']),
                         EXIT_VALIDATION)
        self.assertNotEqual(EXIT_VERIFICATION, EXIT_VALIDATION)

    def tearDown(self):

        _remove_temp()


if __name__ == '__main__':

    unittest.main()
