/**
 * UI state machine over the service wire protocol.
 *
 * dispatch() performs at most one API call per action and updates state
 * only from successful responses; 4xx bodies surface as inline errors and
 * leave the rest of the state untouched.
 */

import type {
  ApiClient,
  DraftDoc,
  MoreDoc,
  NavDoc,
  ObjectTypeInfo,
  PpqDoc,
  SpiderDoc,
} from './api.js'

export type Panel = 'ppq' | 'construction' | 'navigation'

export interface ConstructionBox {
  /** Display text received from the service. */
  verbalization: string
  exprText: string
  draftId: string | null
}

export interface UiState {
  sessionId: string | null
  panel: Panel
  error: string | null
  objectTypes: ObjectTypeInfo[]
  points: string[]
  ppq: PpqDoc | null
  spider: SpiderDoc | null
  nav: NavDoc | null
  boxes: ConstructionBox[]
}

export function initialState(): UiState {
  return {
    sessionId: null,
    panel: 'ppq',
    error: null,
    objectTypes: [],
    points: [],
    ppq: null,
    spider: null,
    nav: null,
    boxes: [],
  }
}

export type UiAction =
  | { kind: 'CreateSession'; schemaText: string }
  | { kind: 'LoadObjectTypes' }
  | { kind: 'AddPoint'; objectType: string }
  | { kind: 'RemovePoint'; index: number }
  | { kind: 'Go' }
  | { kind: 'ChooseAlternative'; segment: number; choice: number }
  | { kind: 'More'; segment: number }
  | { kind: 'SpiderButton'; objectType: string }
  | { kind: 'PruneBranch'; at: number[]; branch: number }
  | { kind: 'ExtendLeaf'; at: number[] }
  | { kind: 'AddPathToConstruction'; exprText: string }
  | { kind: 'SwitchToQbn'; draftIds: string[] }
  | { kind: 'Refine'; factType: string; direction: string }
  | { kind: 'Generalize' }
  | { kind: 'BackToConstruction' }

/** Which panel an action belongs to (one in-flight call per panel). */
export function panelOf(action: UiAction): Panel {
  switch (action.kind) {
    case 'Refine':
    case 'Generalize':
    case 'SwitchToQbn':
    case 'BackToConstruction':
      return 'navigation'
    case 'CreateSession':
    case 'LoadObjectTypes':
    case 'AddPoint':
    case 'RemovePoint':
    case 'Go':
      return 'ppq'
    default:
      return 'construction'
  }
}

function fail(state: UiState, message: string): UiState {
  return { ...state, error: message }
}

function errorText(body: unknown): string {
  if (body && typeof body === 'object' && 'error' in body) {
    return String((body as { error: unknown }).error)
  }
  return 'request failed'
}

export async function dispatch(
  state: UiState,
  action: UiAction,
  client: ApiClient,
): Promise<UiState> {
  const sid = state.sessionId
  switch (action.kind) {
    case 'CreateSession': {
      const r = await client.request('POST', '/sessions', {
        schema_text: action.schemaText,
      })
      if (r.status !== 201) return fail(state, errorText(r.body))
      const body = r.body as { session_id: string }
      return { ...initialState(), sessionId: body.session_id }
    }
    case 'LoadObjectTypes': {
      if (!sid) return fail(state, 'no session')
      const r = await client.request('GET', `/sessions/${sid}/object-types`)
      if (r.status !== 200) return fail(state, errorText(r.body))
      const body = r.body as { object_types: ObjectTypeInfo[] }
      return { ...state, error: null, objectTypes: body.object_types }
    }
    case 'AddPoint':
      return { ...state, error: null, points: [...state.points, action.objectType] }
    case 'RemovePoint':
      return {
        ...state,
        error: null,
        points: state.points.filter((_, i) => i !== action.index),
      }
    case 'Go': {
      if (!sid) return fail(state, 'no session')
      if (state.points.length < 2) return fail(state, 'a query needs at least 2 points')
      const r = await client.request('POST', `/sessions/${sid}/ppq`, {
        points: state.points,
      })
      if (r.status !== 201) return fail(state, errorText(r.body))
      return { ...state, error: null, ppq: r.body as PpqDoc, panel: 'construction' }
    }
    case 'ChooseAlternative': {
      if (!sid || !state.ppq) return fail(state, 'no query under construction')
      const r = await client.request(
        'POST',
        `/sessions/${sid}/ppq/${state.ppq.ppq_id}/select`,
        { segment: action.segment, choice: action.choice },
      )
      if (r.status !== 200) return fail(state, errorText(r.body))
      return { ...state, error: null, ppq: r.body as PpqDoc }
    }
    case 'More': {
      if (!sid || !state.ppq) return fail(state, 'no query under construction')
      const segment = state.ppq.segments[action.segment]
      if (!segment || segment.exhausted) return state // control is disabled
      const r = await client.request(
        'POST',
        `/sessions/${sid}/ppq/${state.ppq.ppq_id}/more`,
        { segment: action.segment },
      )
      if (r.status !== 200) return fail(state, errorText(r.body))
      const more = r.body as MoreDoc
      const segments = state.ppq.segments.map((s, i) =>
        i === action.segment
          ? { ...s, offered: [...s.offered, ...more.additions], exhausted: more.exhausted }
          : s,
      )
      return { ...state, error: null, ppq: { ...state.ppq, segments } }
    }
    case 'SpiderButton': {
      if (!sid) return fail(state, 'no session')
      const r = await client.request('POST', `/sessions/${sid}/spider`, {
        object_type: action.objectType,
      })
      if (r.status !== 201) return fail(state, errorText(r.body))
      return { ...state, error: null, spider: r.body as SpiderDoc }
    }
    case 'PruneBranch': {
      if (!sid || !state.spider) return fail(state, 'no spider result')
      const r = await client.request(
        'POST',
        `/sessions/${sid}/spider/${state.spider.spider_id}/prune`,
        { at: action.at, branch: action.branch },
      )
      if (r.status !== 200) return fail(state, errorText(r.body))
      return { ...state, error: null, spider: r.body as SpiderDoc }
    }
    case 'ExtendLeaf': {
      if (!sid || !state.spider) return fail(state, 'no spider result')
      const r = await client.request(
        'POST',
        `/sessions/${sid}/spider/${state.spider.spider_id}/extend`,
        { at: action.at },
      )
      if (r.status !== 200) return fail(state, errorText(r.body))
      return { ...state, error: null, spider: r.body as SpiderDoc }
    }
    case 'AddPathToConstruction': {
      if (!sid) return fail(state, 'no session')
      const r = await client.request('POST', `/sessions/${sid}/drafts`, {
        expr: action.exprText,
      })
      if (r.status !== 201) return fail(state, errorText(r.body))
      const draft = r.body as DraftDoc
      const box: ConstructionBox = {
        verbalization: draft.verbalization,
        exprText: draft.expr_text,
        draftId: draft.draft_id,
      }
      return { ...state, error: null, boxes: [...state.boxes, box] }
    }
    case 'SwitchToQbn': {
      if (!sid) return fail(state, 'no session')
      if (action.draftIds.length === 0) return fail(state, 'nothing selected')
      const r = await client.request('POST', `/sessions/${sid}/nav`, {
        draft_path_ids: action.draftIds,
      })
      if (r.status !== 201) return fail(state, errorText(r.body))
      return { ...state, error: null, nav: r.body as NavDoc, panel: 'navigation' }
    }
    case 'Refine': {
      if (!sid || !state.nav) return fail(state, 'no navigation session')
      const r = await client.request(
        'POST',
        `/sessions/${sid}/nav/${state.nav.nav_id}/move`,
        { kind: 'refine', fact_type: action.factType, direction: action.direction },
      )
      if (r.status !== 200) return fail(state, errorText(r.body))
      return { ...state, error: null, nav: r.body as NavDoc }
    }
    case 'Generalize': {
      if (!sid || !state.nav) return fail(state, 'no navigation session')
      if (!state.nav.moves.some((m) => m.kind === 'generalize')) return state
      const r = await client.request(
        'POST',
        `/sessions/${sid}/nav/${state.nav.nav_id}/move`,
        { kind: 'generalize' },
      )
      if (r.status !== 200) return fail(state, errorText(r.body))
      return { ...state, error: null, nav: r.body as NavDoc }
    }
    case 'BackToConstruction': {
      // the focus returns to construction as a particle (display only;
      // a draft is created when the user acts on it)
      if (!state.nav) return { ...state, panel: 'construction' }
      const focus = state.nav.focus
      const already = state.boxes.some((b) => b.exprText === focus.expr_text)
      const boxes = already
        ? state.boxes
        : [
            ...state.boxes,
            { verbalization: focus.verbalization, exprText: focus.expr_text, draftId: null },
          ]
      return { ...state, error: null, panel: 'construction', boxes }
    }
  }
}

/**
 * Serializes dispatches so each panel has at most one in-flight call;
 * actions for a busy panel queue behind it.
 */
export class UiStore {
  private chains: Record<Panel, Promise<void>> = {
    ppq: Promise.resolve(),
    construction: Promise.resolve(),
    navigation: Promise.resolve(),
  }

  constructor(
    public state: UiState,
    private readonly client: ApiClient,
    private readonly onChange: (s: UiState) => void = () => {},
  ) {}

  dispatch(action: UiAction): Promise<UiState> {
    const panel = panelOf(action)
    const run = this.chains[panel].then(async () => {
      this.state = await dispatch(this.state, action, this.client)
      this.onChange(this.state)
    })
    this.chains[panel] = run.catch(() => {})
    return run.then(() => this.state)
  }
}
