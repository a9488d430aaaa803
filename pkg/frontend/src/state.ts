/**
 * Pure state machine behind the annotation screen.
 *
 * Invariants enforced here rather than in the DOM layer: a rubric can only
 * be submitted once all six dimensions are selected, selections stay in
 * {0,1,2,3}, a failed submit or fetch preserves the current selections, and
 * the server stays authoritative (applyTask rebuilds everything that
 * matters from a GET next response).
 */

import type { QuestionPayload, TaskResponse } from './api.js'
import { DIMENSIONS, type Dimension, type Score, SCORES } from './rubric.js'

export type Phase = 'loading' | 'scoring' | 'complete' | 'error'

export interface UiSessionState {
  sessionId: string
  phase: Phase
  question: QuestionPayload | null
  scored: number
  total: number
  selections: Partial<Record<Dimension, Score>>
  submitting: boolean
  error: string | null
}

export function initialState(sessionId: string): UiSessionState {
  return {
    sessionId,
    phase: 'loading',
    question: null,
    scored: 0,
    total: 0,
    selections: {},
    submitting: false,
    error: null,
  }
}

/** Rebuild the screen from a GET next response; selections start empty. */
export function applyTask(state: UiSessionState, task: TaskResponse): UiSessionState {
  if (task.done) {
    return {
      ...state,
      phase: 'complete',
      question: null,
      scored: task.total,
      total: task.total,
      selections: {},
      submitting: false,
      error: null,
    }
  }
  return {
    ...state,
    phase: 'scoring',
    question: task.question,
    scored: task.index,
    total: task.total,
    selections: {},
    submitting: false,
    error: null,
  }
}

/** Network failure on fetch: error phase with everything else preserved. */
export function fetchFailed(state: UiSessionState, message: string): UiSessionState {
  return { ...state, phase: 'error', error: message, submitting: false }
}

export function select(
  state: UiSessionState,
  dimension: Dimension,
  score: Score,
): UiSessionState {
  if (state.phase !== 'scoring' || state.submitting) {
    return state
  }
  if (!SCORES.includes(score)) {
    return state
  }
  return { ...state, selections: { ...state.selections, [dimension]: score } }
}

export function allSelected(state: UiSessionState): boolean {
  return DIMENSIONS.every((dim) => state.selections[dim] !== undefined)
}

export function canSubmit(state: UiSessionState): boolean {
  return state.phase === 'scoring' && !state.submitting && allSelected(state)
}

/** Full rubric object, or null while any dimension is unselected. */
export function completedRubric(
  state: UiSessionState,
): Record<Dimension, Score> | null {
  if (!allSelected(state)) {
    return null
  }
  const rubric = {} as Record<Dimension, Score>
  for (const dim of DIMENSIONS) {
    rubric[dim] = state.selections[dim] as Score
  }
  return rubric
}

export function beginSubmit(state: UiSessionState): UiSessionState {
  if (!canSubmit(state)) {
    throw new Error('cannot submit a partial rubric')
  }
  return { ...state, submitting: true, error: null }
}

/** Server rejected the submission: surface its message, keep selections. */
export function submitFailed(state: UiSessionState, message: string): UiSessionState {
  return { ...state, submitting: false, error: message }
}

/** Acknowledged: back to loading so the next GET next drives the screen. */
export function submitSucceeded(state: UiSessionState): UiSessionState {
  return {
    ...state,
    phase: 'loading',
    question: null,
    scored: state.scored + 1,
    selections: {},
    submitting: false,
    error: null,
  }
}
