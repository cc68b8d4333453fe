/**
 * Pure view description of the UI state.
 *
 * render() is deterministic: identical states produce identical trees.
 * Text nodes are tagged by origin so tests can prove every displayed
 * verbalization came from the service ('api') rather than the UI ('chrome').
 */

import type { SpiderTreeDoc } from './api.js'
import type { UiState } from './state.js'

export type ViewNode =
  | { kind: 'panel'; name: string; children: ViewNode[] }
  | { kind: 'text'; text: string; origin: 'api' | 'chrome' }
  | { kind: 'button'; label: string; action: string; enabled: boolean }
  | { kind: 'listbox'; name: string; selected: number | null; items: ViewNode[] }
  | { kind: 'group'; children: ViewNode[] }

const chrome = (text: string): ViewNode => ({ kind: 'text', text, origin: 'chrome' })
const api = (text: string): ViewNode => ({ kind: 'text', text, origin: 'api' })

function renderPpqPanel(state: UiState): ViewNode {
  const children: ViewNode[] = []
  children.push({
    kind: 'listbox',
    name: 'object-types',
    selected: null,
    items: state.objectTypes.map((o) => api(o.display)),
  })
  children.push({
    kind: 'listbox',
    name: 'points',
    selected: null,
    items: state.points.map((p) => api(p)),
  })
  children.push({ kind: 'button', label: 'Add Point', action: 'AddPoint', enabled: true })
  children.push({
    kind: 'button',
    label: 'Go!',
    action: 'Go',
    enabled: state.sessionId !== null && state.points.length >= 2,
  })
  return { kind: 'panel', name: 'point to point query', children }
}

function renderConstructionPanel(state: UiState): ViewNode {
  const children: ViewNode[] = []
  if (state.ppq) {
    for (const segment of state.ppq.segments) {
      children.push({
        kind: 'group',
        children: [
          {
            kind: 'listbox',
            name: `segment-${segment.index}`,
            selected: segment.selected,
            items: segment.offered.map((o) => api(o.verbalization)),
          },
          {
            kind: 'button',
            label: 'MORE',
            action: `More:${segment.index}`,
            enabled: !segment.exhausted,
          },
        ],
      })
    }
    children.push(api(state.ppq.combined.verbalization))
  }
  for (const [i, box] of state.boxes.entries()) {
    children.push({
      kind: 'group',
      children: [
        api(box.verbalization),
        {
          kind: 'button',
          label: 'QBN',
          action: `SwitchToQbn:${i}`,
          enabled: box.draftId !== null,
        },
      ],
    })
  }
  if (state.spider) {
    children.push(renderSpiderTree(state.spider.tree, []))
  }
  return { kind: 'panel', name: 'query by construction', children }
}

function renderSpiderTree(tree: SpiderTreeDoc, at: number[]): ViewNode {
  const children: ViewNode[] = [api(tree.display)]
  if (tree.branches.length === 0) {
    children.push({
      kind: 'button',
      label: 'extend',
      action: `ExtendLeaf:${at.join('.')}`,
      enabled: true,
    })
  }
  tree.branches.forEach((branch, i) => {
    children.push({
      kind: 'group',
      children: [
        api(branch.text),
        {
          kind: 'button',
          label: 'prune',
          action: `PruneBranch:${at.join('.')}:${i}`,
          enabled: true,
        },
        renderSpiderTree(branch.child, [...at, i]),
      ],
    })
  })
  return { kind: 'group', children }
}

function renderNavigationPanel(state: UiState): ViewNode {
  const children: ViewNode[] = []
  if (state.nav) {
    children.push(api(state.nav.focus.verbalization))
    const hasGeneralize = state.nav.moves.some((m) => m.kind === 'generalize')
    for (const move of state.nav.moves) {
      if (move.kind === 'refine') {
        children.push({
          kind: 'group',
          children: [
            api(move.text ?? ''),
            {
              kind: 'button',
              label: 'refine',
              action: `Refine:${move.fact_type}:${move.direction}`,
              enabled: true,
            },
          ],
        })
      }
    }
    children.push({
      kind: 'button',
      label: 'generalize',
      action: 'Generalize',
      enabled: hasGeneralize,
    })
    children.push({
      kind: 'button',
      label: 'back to construction',
      action: 'BackToConstruction',
      enabled: true,
    })
  } else {
    children.push(chrome('no navigation session'))
  }
  return { kind: 'panel', name: 'query by navigation', children }
}

export function render(state: UiState): ViewNode {
  const children: ViewNode[] = []
  if (state.error) {
    // status messaging, not a verbalization: chrome either way
    children.push({ kind: 'group', children: [chrome('error'), chrome(state.error)] })
  }
  children.push(renderPpqPanel(state))
  children.push(renderConstructionPanel(state))
  if (state.panel === 'navigation' || state.nav) {
    children.push(renderNavigationPanel(state))
  }
  return { kind: 'panel', name: state.panel, children }
}

/** All text nodes of a view, for provenance and display checks. */
export function collectTexts(node: ViewNode): { text: string; origin: string }[] {
  switch (node.kind) {
    case 'text':
      return [{ text: node.text, origin: node.origin }]
    case 'button':
      return []
    case 'panel':
    case 'group':
      return node.children.flatMap(collectTexts)
    case 'listbox':
      return node.items.flatMap(collectTexts)
  }
}
