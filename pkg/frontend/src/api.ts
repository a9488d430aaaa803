/**
 * Thin typed client for the review service's HTTP+JSON endpoints.
 * Service errors arrive as {code, message} bodies and are rethrown as
 * ServiceError so the UI can surface them verbatim.
 */

import type { Dimension, Score } from './rubric.js'

export interface SessionInfo {
  session_id: string
  annotator_id: string
  dataset_path: string
  n: number
  seed: number
  cursor: number
  status: 'open' | 'complete'
}

export interface QuestionPayload {
  question_id: string
  text: string
  host_qid: string
  guest_qid: string
  bridge_answer: string
  bridge_span: [number, number]
  answer: string
  show: string
  season: number
  episode: number
  segs: [string, string]
  hops: number
}

export interface TaskResponse {
  session_id: string
  annotator_id: string
  index: number
  total: number
  done: boolean
  question: QuestionPayload | null
}

export interface SubmitResponse {
  ok: boolean
  cursor: number
  status: 'open' | 'complete'
}

export interface AgreementReport {
  dimension_means: Record<Dimension, number>
  n_questions: number
  n_annotators: number
  mean_pairwise_kappa: number | null
  pair_kappas: { a: string; b: string; kappa: number }[]
  pair_dimension_kappas: { a: string; b: string; kappas: Record<Dimension, number> }[]
  excluded_pairs: [string, string][]
  kappa_note: string | null
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message)
    this.name = 'ServiceError'
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    ...init,
    headers: { 'content-type': 'application/json', ...(init?.headers ?? {}) },
  })
  if (!response.ok) {
    let code = 'http_error'
    let message = `HTTP ${response.status}`
    try {
      const body = (await response.json()) as { code?: string; message?: string }
      if (body.code) code = body.code
      if (body.message) message = body.message
    } catch {
      // non-JSON error body: keep the generic message
    }
    throw new ServiceError(response.status, code, message)
  }
  return (await response.json()) as T
}

export function createSession(
  base: string,
  params: { annotator_id: string; dataset_path: string; n: number; seed: number },
): Promise<SessionInfo> {
  return request<SessionInfo>(`${base}/sessions`, {
    method: 'POST',
    body: JSON.stringify(params),
  })
}

export function fetchTask(base: string, sessionId: string): Promise<TaskResponse> {
  return request<TaskResponse>(`${base}/sessions/${sessionId}/next`)
}

export function submitRubric(
  base: string,
  sessionId: string,
  questionId: string,
  rubric: Record<Dimension, Score>,
): Promise<SubmitResponse> {
  return request<SubmitResponse>(`${base}/sessions/${sessionId}/scores`, {
    method: 'POST',
    body: JSON.stringify({ question_id: questionId, rubric }),
  })
}

export function fetchReport(
  base: string,
  params: { dataset: string; n: number; seed: number },
): Promise<AgreementReport> {
  const query = new URLSearchParams({
    dataset: params.dataset,
    n: String(params.n),
    seed: String(params.seed),
  })
  return request<AgreementReport>(`${base}/reports?${query}`)
}
