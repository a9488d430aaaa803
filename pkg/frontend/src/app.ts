/**
 * DOM wiring for the annotation screen: one question at a time, six rubric
 * blocks with the full anchor guidance, a submit button that stays disabled
 * until every dimension has a score, and a live agreement report once the
 * session completes. All state transitions go through state.ts; the server
 * remains the source of truth (a refresh replays GET next).
 */

import {
  createSession,
  fetchReport,
  fetchTask,
  ServiceError,
  submitRubric,
  type AgreementReport,
} from './api.js'
import { RUBRIC, SCORES, type Dimension, type Score } from './rubric.js'
import {
  applyTask,
  beginSubmit,
  canSubmit,
  completedRubric,
  fetchFailed,
  initialState,
  select,
  submitFailed,
  submitSucceeded,
  type UiSessionState,
} from './state.js'

interface StudyParams {
  base: string
  annotatorId: string
  datasetPath: string
  n: number
  seed: number
}

let state: UiSessionState | null = null
let params: StudyParams | null = null

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

function setState(next: UiSessionState): void {
  state = next
  render()
}

async function loadNext(): Promise<void> {
  if (!state || !params) return
  try {
    const task = await fetchTask(params.base, state.sessionId)
    setState(applyTask(state, task))
  } catch (err) {
    setState(fetchFailed(state, describe(err)))
  }
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) return `${err.code}: ${err.message}`
  return err instanceof Error ? err.message : String(err)
}

async function onSubmit(): Promise<void> {
  if (!state || !params || !canSubmit(state)) return
  const rubric = completedRubric(state)
  const question = state.question
  if (!rubric || !question) return
  setState(beginSubmit(state))
  try {
    await submitRubric(params.base, state.sessionId, question.question_id, rubric)
    setState(submitSucceeded(state!))
    await loadNext()
  } catch (err) {
    setState(submitFailed(state!, describe(err)))
  }
}

async function onStart(event: Event): Promise<void> {
  event.preventDefault()
  const base = (el<HTMLInputElement>('server').value || '').replace(/\/$/, '')
  params = {
    base,
    annotatorId: el<HTMLInputElement>('annotator').value.trim(),
    datasetPath: el<HTMLInputElement>('dataset').value.trim(),
    n: Number(el<HTMLInputElement>('count').value),
    seed: Number(el<HTMLInputElement>('seed').value),
  }
  try {
    const session = await createSession(base, {
      annotator_id: params.annotatorId,
      dataset_path: params.datasetPath,
      n: params.n,
      seed: params.seed,
    })
    el('setup').hidden = true
    el('screen').hidden = false
    setState(initialState(session.session_id))
    await loadNext()
  } catch (err) {
    el('setup-error').textContent = describe(err)
  }
}

function render(): void {
  if (!state) return
  el('progress').textContent =
    state.total > 0 ? `${state.scored} of ${state.total} scored` : ''
  el('banner').textContent = state.error ?? ''
  el('banner').hidden = !state.error

  const retry = el<HTMLButtonElement>('retry')
  retry.hidden = state.phase !== 'error'

  const card = el('question-card')
  const done = el('completion')
  if (state.phase === 'complete') {
    card.hidden = true
    done.hidden = false
    void showReport()
    return
  }
  done.hidden = true
  card.hidden = state.phase !== 'scoring' && state.phase !== 'error'

  if (state.question) {
    el('question-text').textContent = state.question.text
    el('question-meta').textContent =
      `${state.question.show} s${state.question.season}e${state.question.episode}` +
      ` · segments ${state.question.segs.join(' + ')}` +
      ` · final answer: ${state.question.answer}`
  }

  for (const block of RUBRIC) {
    for (const score of SCORES) {
      const input = document.querySelector<HTMLInputElement>(
        `input[name="${block.key}"][value="${score}"]`,
      )
      if (input) {
        input.checked = state.selections[block.key] === score
        input.disabled = state.submitting
      }
    }
  }
  el<HTMLButtonElement>('submit').disabled = !canSubmit(state)
}

async function showReport(): Promise<void> {
  if (!params) return
  const target = el('report')
  try {
    const report = await fetchReport(params.base, {
      dataset: params.datasetPath,
      n: params.n,
      seed: params.seed,
    })
    target.textContent = formatReport(report)
  } catch (err) {
    target.textContent = `report unavailable yet: ${describe(err)}`
  }
}

export function formatReport(report: AgreementReport): string {
  const lines = RUBRIC.map(
    (block) => `${block.title}: ${report.dimension_means[block.key].toFixed(2)}`,
  )
  lines.push(`Questions: ${report.n_questions}, annotators: ${report.n_annotators}`)
  if (report.mean_pairwise_kappa !== null) {
    lines.push(`Mean pairwise kappa: ${report.mean_pairwise_kappa.toFixed(4)}`)
  } else {
    lines.push(`Kappa: n/a (${report.kappa_note ?? 'not computable'})`)
  }
  return lines.join('\n')
}

function buildRubricBlocks(): void {
  const host = el('rubric')
  for (const block of RUBRIC) {
    const section = document.createElement('fieldset')
    const legend = document.createElement('legend')
    legend.textContent = block.title
    section.appendChild(legend)

    const help = document.createElement('p')
    help.className = 'help'
    help.textContent = block.description
    section.appendChild(help)

    for (const anchor of block.anchors) {
      const row = document.createElement('label')
      row.className = 'anchor'
      const input = document.createElement('input')
      input.type = 'radio'
      input.name = block.key
      input.value = String(anchor.score)
      input.addEventListener('change', () => {
        if (state) {
          setState(select(state, block.key as Dimension, anchor.score as Score))
        }
      })
      row.appendChild(input)
      const text = document.createElement('span')
      text.textContent = ` ${anchor.score}: ${anchor.label}. Example: ${anchor.example}`
      row.appendChild(text)
      section.appendChild(row)
    }
    host.appendChild(section)
  }
}

export function boot(): void {
  buildRubricBlocks()
  el<HTMLFormElement>('start-form').addEventListener('submit', (e) => void onStart(e))
  el<HTMLButtonElement>('submit').addEventListener('click', () => void onSubmit())
  el<HTMLButtonElement>('retry').addEventListener('click', () => void loadNext())
}

if (typeof document !== 'undefined' && document.getElementById('start-form')) {
  boot()
}
