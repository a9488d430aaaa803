import { afterEach, describe, expect, it, vi } from 'vitest'

import {
  createSession,
  fetchReport,
  fetchTask,
  ServiceError,
  submitRubric,
} from './api.js'

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  })
}

afterEach(() => {
  vi.unstubAllGlobals()
})

describe('api client', () => {
  it('creates sessions with a JSON body', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse({ session_id: 'abc', status: 'open', cursor: 0 }),
    )
    vi.stubGlobal('fetch', fetchMock)
    const session = await createSession('http://svc', {
      annotator_id: 'ann1',
      dataset_path: 'ds.jsonl',
      n: 5,
      seed: 7,
    })
    expect(session.session_id).toBe('abc')
    const [url, init] = fetchMock.mock.calls[0]!
    expect(url).toBe('http://svc/sessions')
    expect(JSON.parse(init.body).annotator_id).toBe('ann1')
  })

  it('fetches the next task', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse({ done: true, index: 5, total: 5, question: null }),
    )
    vi.stubGlobal('fetch', fetchMock)
    const taskResponse = await fetchTask('http://svc', 's1')
    expect(taskResponse.done).toBe(true)
    expect(fetchMock.mock.calls[0]![0]).toBe('http://svc/sessions/s1/next')
  })

  it('posts rubric scores', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse({ ok: true, cursor: 1, status: 'open' }),
    )
    vi.stubGlobal('fetch', fetchMock)
    await submitRubric('http://svc', 's1', 'q1', {
      fluency: 3,
      relevance: 3,
      multi_hop_reasoning: 3,
      engagingness: 3,
      factual_correctness: 3,
      inclusiveness: 3,
    })
    const [url, init] = fetchMock.mock.calls[0]!
    expect(url).toBe('http://svc/sessions/s1/scores')
    expect(JSON.parse(init.body).rubric.fluency).toBe(3)
  })

  it('builds report query strings', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ n_questions: 5 }))
    vi.stubGlobal('fetch', fetchMock)
    await fetchReport('http://svc', { dataset: 'a b.jsonl', n: 5, seed: 7 })
    const url = fetchMock.mock.calls[0]![0] as string
    expect(url).toContain('/reports?')
    expect(url).toContain('n=5')
    expect(url).toContain('seed=7')
    expect(decodeURIComponent(url)).toContain('a+b.jsonl')
  })

  it('rethrows service errors with code and message', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn().mockResolvedValue(
        jsonResponse({ code: 'out_of_order', message: 'expected q1' }, 409),
      ),
    )
    const failure = await fetchTask('http://svc', 's1').catch((e) => e)
    expect(failure).toBeInstanceOf(ServiceError)
    expect(failure.code).toBe('out_of_order')
    expect(failure.status).toBe(409)
    expect(failure.message).toBe('expected q1')
  })

  it('survives non-JSON error bodies', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn().mockResolvedValue(new Response('boom', { status: 502 })),
    )
    const failure = await fetchTask('http://svc', 's1').catch((e) => e)
    expect(failure).toBeInstanceOf(ServiceError)
    expect(failure.code).toBe('http_error')
  })
})
