/**
 * Wire types for the query formulation service and the client interface.
 *
 * The UI is a thin client: every verbalization it shows originates from
 * these payloads, never from local rendering rules.
 */

export interface ObjectTypeInfo {
  id: string
  name: string
  kind: string
  reference_scheme: string | null
  display: string
  degree: number
}

export interface StepRef {
  fact_type: string
  direction: string
}

export interface PathRef {
  head: string
  steps: StepRef[]
}

export interface OfferedPath {
  index: number
  weight: number
  verbalization: string
  expr_text: string
  path: PathRef
}

export interface PpqSegmentDoc {
  index: number
  source: string
  target: string
  selected: number
  offered: OfferedPath[]
  exhausted: boolean
}

export interface PpqDoc {
  ppq_id: string
  points: string[]
  segments: PpqSegmentDoc[]
  combined: { verbalization: string; expr_text: string }
}

export interface MoreDoc {
  segment: number
  additions: OfferedPath[]
  exhausted: boolean
}

export interface SpiderBranchDoc {
  step: StepRef
  text: string
  child: SpiderTreeDoc
}

export interface SpiderTreeDoc {
  root: string
  display: string
  branches: SpiderBranchDoc[]
}

export interface SpiderDoc {
  spider_id: string
  tree: SpiderTreeDoc
  paths: { verbalization: string; expr_text: string }[]
}

export interface NavMoveDoc {
  kind: 'refine' | 'generalize'
  fact_type?: string
  direction?: string
  text?: string
}

export interface NavDoc {
  nav_id: string
  focus: { verbalization: string; expr_text: string; head: string; tail: string }
  moves: NavMoveDoc[]
}

export interface DraftDoc {
  draft_id: string
  expr_text: string
  verbalization: string
  head: string
  tail: string
}

export interface ApiResult {
  status: number
  body: unknown
}

/** One request at a time per caller; implementations never retry. */
export interface ApiClient {
  request(method: string, path: string, body?: unknown): Promise<ApiResult>
}

/** fetch-backed client for the real service. */
export class HttpApiClient implements ApiClient {
  constructor(private readonly baseUrl: string = '') {}

  async request(method: string, path: string, body?: unknown): Promise<ApiResult> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    })
    return { status: response.status, body: await response.json() }
  }
}
