import math

import numpy as np
import pytest

import dubinsguard as dg
from conftest import aligned_state, bare_intercept_run, make_state


class TestPursuitSimple:
    def test_vertical_examples(self):
        assert dg.pursuit_simple((0, 2), (0, 1), 2.0) == pytest.approx([0, -1])
        assert dg.pursuit_simple((0, 0), (0, 3), 6.3) == pytest.approx([0, 1])

    def test_mirror_symmetry(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            x_p = rng.normal(size=2)
            x_e = x_p + rng.normal(size=2)
            if np.linalg.norm(x_p - x_e) < 1e-3:
                continue
            alpha = rng.uniform(1.2, 6.0)
            u = dg.pursuit_simple(x_p, x_e, alpha)
            mirrored = dg.pursuit_simple(x_p * [-1, 1], x_e * [-1, 1], alpha)
            assert mirrored == pytest.approx(u * [-1, 1], abs=1e-12)


class TestInterceptGains:
    def test_vertical_offset(self):
        p = dg.GameParams(v_p=2.0, v_e=1.0, kappa=0.5, r=0.1)
        g = dg.intercept_gains(make_state(0, 1, 0.0, 0, 0), p)
        assert g.vec == pytest.approx([1 / 6, 0.0], abs=1e-15)
        assert g.bias == pytest.approx(0.0, abs=1e-15)

    def test_horizontal_offset(self):
        p = dg.GameParams(v_p=2.0, v_e=1.0, kappa=0.5, r=0.1)
        g = dg.intercept_gains(make_state(1, 0, 0.0, 0, 0), p)
        assert g.vec == pytest.approx([0.0, -0.2], abs=1e-15)
        assert g.bias == pytest.approx(-2 / 5**1.5, abs=1e-15)

    def test_pursuer_below_evader(self):
        p = dg.GameParams(v_p=2.0, v_e=1.0, kappa=0.5, r=0.1)
        g = dg.intercept_gains(make_state(0, 0, 0.0, 0, 1), p)
        assert g.vec == pytest.approx([-0.5, 0.0], abs=1e-15)
        assert g.bias == pytest.approx(0.0, abs=1e-15)

    def test_rejects_coincident(self):
        p = dg.GameParams(v_p=2.0, v_e=1.0, kappa=0.5, r=0.1)
        with pytest.raises(ValueError):
            dg.intercept_gains(make_state(1, 1, 0.0, 1, 1), p)

    def test_magnitude_bound_under_feasible_parameters(self, paper):
        # worst-case |turn command| over all unit evader controls is
        # ||vec|| + |bias|; must stay admissible whenever the pair is at
        # least a capture radius apart
        rng = np.random.default_rng(32)
        worst = 0.0
        for _ in range(10_000):
            x_p = rng.uniform(-1, 1, size=2)
            bearing = rng.uniform(0, 2 * math.pi)
            dist = rng.uniform(paper.r, 2.0)
            x_e = x_p + dist * np.array([math.cos(bearing), math.sin(bearing)])
            g = dg.intercept_gains(
                make_state(x_p[0], x_p[1], 0.0, x_e[0], x_e[1]), paper
            )
            worst = max(worst, float(np.linalg.norm(g.vec)) + abs(g.bias))
        assert worst <= 1.0 + 1e-9


class TestPursuitIntercept:
    def test_vertical_config_responses(self):
        p = dg.GameParams(v_p=2.0, v_e=1.0, kappa=0.5, r=0.1)
        state = make_state(0, 1, 0.0, 0, 0)
        assert dg.pursuit_intercept(state, (1, 0), p) == pytest.approx(1 / 6)
        # evader running straight down the common axis: pure pursuit line
        assert dg.pursuit_intercept(state, (0, -1), p) == pytest.approx(0.0)

    def test_clamp_diagnostics(self):
        # grossly infeasible parameters force |command| > 1
        p = dg.GameParams(v_p=2.0, v_e=1.0, kappa=50.0, r=0.1)
        diag = dg.ClampDiagnostics()
        state = make_state(0, 1, 0.0, 0, 0)
        u = dg.pursuit_intercept(state, (1, 0), p, diag)
        assert abs(u) <= 1.0
        assert diag.events == 1
        assert diag.max_excess > 1e-9


class TestHeadingAdjust:
    def _state_with_error(self, delta):
        data = dg.interception((0, 2), (1, 1), 3.0)
        return make_state(0, 2, dg.wrap_angle(data.angle - delta), 1, 1)

    def test_turns_toward_shorter_sweep(self):
        p = dg.GameParams(3.0, 1.0, 1.0, 0.1)
        assert dg.heading_adjust(self._state_with_error(math.pi / 4), p) == 1.0
        assert dg.heading_adjust(self._state_with_error(-math.pi / 4), p) == -1.0

    def test_opposite_heading_turns_clockwise(self):
        p = dg.GameParams(3.0, 1.0, 1.0, 0.1)
        assert dg.heading_adjust(self._state_with_error(math.pi), p) == -1.0


class TestTwoStep:
    def test_already_aligned_goes_straight_to_intercept(self, paper):
        state = aligned_state(0, 0.95, 0.35, 0.40, paper.alpha)
        u_e = dg.evader_optimal(state, paper)
        mode = dg.TwoStepState()
        u, mode = dg.two_step(state, u_e, paper, mode)
        assert mode.phase is dg.Phase.INTERCEPTING
        assert u == pytest.approx(dg.pursuit_intercept(state, u_e, paper))

    def test_unaligned_returns_bang_command(self, paper):
        data = dg.interception((0, 0.9), (0.3, 0.4), paper.alpha)
        state = make_state(0, 0.9, dg.wrap_angle(data.angle + 1.0), 0.3, 0.4)
        mode = dg.TwoStepState()
        u, mode = dg.two_step(state, (0, -1), paper, mode)
        assert u in (-1.0, 1.0)
        assert mode.phase is dg.Phase.ADJUSTING
        assert mode.last_error is not None

    def test_zero_crossing_triggers_transition(self, paper):
        data = dg.interception((0, 0.9), (0.3, 0.4), paper.alpha)
        before = make_state(0, 0.9, dg.wrap_angle(data.angle - 1e-4), 0.3, 0.4)
        after = make_state(0, 0.9, dg.wrap_angle(data.angle + 1e-4), 0.3, 0.4)
        mode = dg.TwoStepState()
        _, mode = dg.two_step(before, (0, -1), paper, mode)
        assert mode.phase is dg.Phase.ADJUSTING
        _, mode = dg.two_step(after, (0, -1), paper, mode)
        assert mode.phase is dg.Phase.INTERCEPTING

    def test_transition_happens_once(self, paper):
        state = aligned_state(0, 0.95, 0.35, 0.40, paper.alpha)
        u_e = dg.evader_optimal(state, paper)
        mode = dg.TwoStepState(phase=dg.Phase.INTERCEPTING)
        _, mode2 = dg.two_step(state, u_e, paper, mode)
        assert mode2 is mode


class TestEvaderStrategies:
    def test_optimal_examples(self):
        p2 = dg.GameParams(2.0, 1.0, 1.0, 0.1)
        assert dg.evader_optimal(make_state(0, 2, 0.0, 0, 1), p2) == pytest.approx(
            [0, -1]
        )
        p63 = dg.GameParams.from_alpha(0.3, 6.3, 0.0625, 0.1)
        assert dg.evader_optimal(make_state(0, 0, 0.0, 0, 3), p63) == pytest.approx(
            [0, -1]
        )

    def test_optimal_mirror_symmetry(self):
        p = dg.GameParams(2.0, 1.0, 1.0, 0.1)
        u = dg.evader_optimal(make_state(0.5, 2, 0.0, 0.2, 1), p)
        m = dg.evader_optimal(make_state(-0.5, 2, 0.0, -0.2, 1), p)
        assert m == pytest.approx(u * [-1, 1], abs=1e-12)

    def test_constant_examples(self):
        assert dg.evader_constant(3 * math.pi / 2) == pytest.approx([0, -1])
        assert dg.evader_constant(0.0) == pytest.approx([1, 0])
        assert dg.evader_constant(math.pi) == pytest.approx([-1, 0], abs=1e-15)

    def test_random_goal_heads_downward_and_is_deterministic(self):
        a = dg.evader_random_goal((0, 1), np.random.default_rng(5))
        b = dg.evader_random_goal((0, 1), np.random.default_rng(5))
        assert a == b
        rng = np.random.default_rng(6)
        for _ in range(1000):
            assert math.sin(dg.evader_random_goal((0, 1), rng)) < 0

    def test_random_goal_mean_descent_rate(self):
        rng = np.random.default_rng(7)
        samples = [math.sin(dg.evader_random_goal((0, 1), rng)) for _ in range(10_000)]
        assert np.mean(samples) == pytest.approx(-2 / math.pi, abs=0.02)


class TestInterceptDynamics:
    """Discrete-time behavior of the interception-tracking strategy."""

    def test_clearance_conserved_against_best_response(self, paper):
        state = aligned_state(0, 0.95, 0.35, 0.40, paper.alpha)
        dt = 1e-4
        rhos, us, errs, captured = bare_intercept_run(
            state, paper, dt, 10_000, lambda s: dg.evader_optimal(s, paper)
        )
        assert captured is None
        drift = max(abs(r - rhos[0]) for r in rhos)
        assert drift <= 10 * dt
        assert max(abs(u) for u in us) <= 1 + 1e-9

    def test_clearance_monotone_against_constant_headings(self, paper):
        state = aligned_state(0, 0.95, 0.35, 0.40, paper.alpha)
        dt = 1e-3
        rng = np.random.default_rng(41)
        for _ in range(20):
            heading = rng.uniform(0, 2 * math.pi)
            rhos, _, _, _ = bare_intercept_run(
                state, paper, dt, 1000, lambda s: dg.evader_constant(heading)
            )
            drops = [b - a for a, b in zip(rhos, rhos[1:])]
            assert min(drops, default=0.0) >= -10 * dt * dt

    def test_alignment_persists(self, paper):
        # without any snap the wrapped error must stay within ten alignment
        # tolerances over a full time unit
        state = aligned_state(0, 0.95, 0.35, 0.40, paper.alpha)
        rng = np.random.default_rng(42)
        for _ in range(5):
            heading = rng.uniform(0, 2 * math.pi)
            _, _, errs, _ = bare_intercept_run(
                state,
                paper,
                1e-4,
                10_000,
                lambda s: dg.evader_constant(heading),
                snap_band=None,
            )
            assert max(errs) <= 10 * dg.IO_TOL

    def test_adjustment_alignment_progress(self, paper):
        # full-rate heading adjustment: the alignment cosine never decreases
        # until the error crosses zero, for any constant evader heading
        rng = np.random.default_rng(43)
        for _ in range(5):
            state = dg.sample_adjust_feasible_state(rng, paper, d_range=(0.35, 1.0))
            heading = rng.uniform(0, 2 * math.pi)
            ps, es = state.pursuer, state.evader
            dt = 1e-3
            q_prev = None
            last_err = None
            for _step in range(2000):
                pair = dg.JointState(pursuer=ps, evader=es)
                err = dg.heading_error(pair, paper)
                crossed = (
                    last_err is not None
                    and (err > 0) != (last_err > 0)
                    and abs(err) < 0.5 * math.pi
                    and abs(last_err) < 0.5 * math.pi
                )
                if abs(err) <= 1e-6 or crossed:
                    break
                q = math.cos(err)
                if q_prev is not None:
                    assert q >= q_prev - 1e-12
                q_prev = q
                last_err = err
                u = dg.heading_adjust(pair, paper)
                ps = dg.step_pursuer(ps, u, dt, paper)
                es = dg.step_evader(es, dg.evader_constant(heading), dt, paper)
            else:
                pytest.fail("alignment not reached within the horizon")
