/** Client-side view state: slider values (always clamped) and action gating. */

import { SolutionSummary } from "./types.js";

export const ALPHA_MIN = 0;
export const ALPHA_MAX = 1000;
export const BETA_MIN = 1;
export const BETA_MAX = 2;
export const TIME_MIN_MS = 1;
export const TIME_MAX_MS = 600_000;

export interface SliderValues {
  alpha: number;
  beta: number;
  timeLimitMs: number;
}

export interface ViewState {
  sessionId: string;
  sliders: SliderValues;
  pending: boolean;
  summary: SolutionSummary | null;
  previousSummary: SolutionSummary | null;
  selectedCluster: number;
  notice: string;
}

const clamp = (value: number, lo: number, hi: number) =>
  Number.isFinite(value) ? Math.min(hi, Math.max(lo, value)) : lo;

export function clampSliders(values: SliderValues): SliderValues {
  return {
    alpha: clamp(values.alpha, ALPHA_MIN, ALPHA_MAX),
    beta: clamp(values.beta, BETA_MIN, BETA_MAX),
    timeLimitMs: clamp(values.timeLimitMs, TIME_MIN_MS, TIME_MAX_MS),
  };
}

export function initialState(sessionId: string): ViewState {
  return {
    sessionId,
    sliders: { alpha: 250, beta: 1.6, timeLimitMs: 5000 },
    pending: false,
    summary: null,
    previousSummary: null,
    selectedCluster: 0,
    notice: "",
  };
}

/** Recalc is allowed whenever idle; refine additionally needs a solution. */
export function allowedActions(state: ViewState): { recalc: boolean; refine: boolean } {
  return {
    recalc: !state.pending,
    refine: !state.pending && state.summary !== null,
  };
}

/** Store a fresh summary, remembering the previous one for dashboard deltas. */
export function acceptSummary(state: ViewState, summary: SolutionSummary): ViewState {
  return {
    ...state,
    previousSummary: state.summary,
    summary,
    selectedCluster: Math.min(state.selectedCluster, summary.k - 1),
  };
}
