/**
 * Browser entry: wires the state machine to the DOM against a live service.
 *
 * Serve the repository root and the service on the same origin (or set
 * window.CQF_BASE_URL) and open webui/index.html.
 */

import { HttpApiClient } from './api.js'
import { toElement } from './dom.js'
import { render } from './render.js'
import { initialState, UiStore, type UiAction } from './state.js'

declare global {
  interface Window {
    CQF_BASE_URL?: string
  }
}

const SCHEMA_TEXT = `# Election administration schema (EL-1)
object Politician id:name
object President id:name
object Administration id:ordinal
object Election id:year
object Year value
object NrOfVotes value
object Party id:name

fact FT1: Politician "is president of" / "is headed by" Administration
fact FT2: Administration "inaugurated in" / "of inauguration of" Year
fact FT3: President "winning" / "won by" Election
fact FT4: Election "which resulted in" / "of" NrOfVotes
fact FT5: President "being" / "who is" Politician
fact FT6: Politician "member of" / "with member" Party
fact FT7: Election "held in" / "of election" Year
`

function parseAction(text: string, store: UiStore): UiAction | null {
  const [kind, ...args] = text.split(':')
  switch (kind) {
    case 'Go':
      return { kind: 'Go' }
    case 'Generalize':
      return { kind: 'Generalize' }
    case 'BackToConstruction':
      return { kind: 'BackToConstruction' }
    case 'More':
      return { kind: 'More', segment: Number(args[0]) }
    case 'Refine':
      return { kind: 'Refine', factType: args[0] ?? '', direction: args[1] ?? '' }
    case 'PruneBranch':
      return {
        kind: 'PruneBranch',
        at: args[0] ? args[0].split('.').map(Number) : [],
        branch: Number(args[1]),
      }
    case 'ExtendLeaf':
      return { kind: 'ExtendLeaf', at: args[0] ? args[0].split('.').map(Number) : [] }
    case 'SwitchToQbn': {
      const box = store.state.boxes[Number(args[0])]
      return box?.draftId ? { kind: 'SwitchToQbn', draftIds: [box.draftId] } : null
    }
    case 'AddPoint': {
      const choice = window.prompt('object type to add as a point')
      return choice ? { kind: 'AddPoint', objectType: choice } : null
    }
    default:
      return null
  }
}

async function boot(): Promise<void> {
  const root = document.getElementById('app')
  if (!root) return
  const client = new HttpApiClient(window.CQF_BASE_URL ?? '')
  const store = new UiStore(initialState(), client, (state) => {
    root.replaceChildren(
      toElement(render(state), (action) => {
        const parsed = parseAction(action, store)
        if (parsed) void store.dispatch(parsed)
      }),
    )
  })
  await store.dispatch({ kind: 'CreateSession', schemaText: SCHEMA_TEXT })
  await store.dispatch({ kind: 'LoadObjectTypes' })
}

void boot()
