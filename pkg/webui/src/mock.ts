/**
 * Replay client: serves recorded wire exchanges instead of a live service.
 *
 * Requests must match a recorded entry on method, path and body; each
 * recording is consumed in order per key, so a test fails loudly when the
 * UI issues a call that never happened against the real service.
 */

import type { ApiClient, ApiResult } from './api.js'

export interface RecordedExchange {
  method: string
  path: string
  body: unknown
  status: number
  response: unknown
}

function canonical(value: unknown): string {
  if (value === null || value === undefined) return 'null'
  if (Array.isArray(value)) return `[${value.map(canonical).join(',')}]`
  if (typeof value === 'object') {
    const entries = Object.entries(value as Record<string, unknown>)
      .filter(([, v]) => v !== undefined)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${canonical(v)}`)
    return `{${entries.join(',')}}`
  }
  return JSON.stringify(value)
}

function keyOf(method: string, path: string, body: unknown): string {
  return `${method} ${path} ${canonical(body ?? null)}`
}

export class MockApiClient implements ApiClient {
  private remaining = new Map<string, RecordedExchange[]>()
  /** Every string that occurred anywhere in a served response. */
  readonly servedStrings = new Set<string>()

  constructor(recording: RecordedExchange[]) {
    for (const exchange of recording) {
      const key = keyOf(exchange.method, exchange.path, exchange.body)
      const queue = this.remaining.get(key) ?? []
      queue.push(exchange)
      this.remaining.set(key, queue)
    }
  }

  async request(method: string, path: string, body?: unknown): Promise<ApiResult> {
    const key = keyOf(method, path, body)
    const queue = this.remaining.get(key)
    const exchange = queue?.shift()
    if (!exchange) {
      throw new Error(`no recorded exchange for: ${key}`)
    }
    collectStrings(exchange.response, this.servedStrings)
    return { status: exchange.status, body: exchange.response }
  }
}

function collectStrings(value: unknown, into: Set<string>): void {
  if (typeof value === 'string') {
    into.add(value)
  } else if (Array.isArray(value)) {
    value.forEach((v) => collectStrings(v, into))
  } else if (value && typeof value === 'object') {
    Object.values(value as Record<string, unknown>).forEach((v) =>
      collectStrings(v, into),
    )
  }
}
