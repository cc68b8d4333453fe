/**
 * Minimal DOM realization of a view tree; actions bubble back as strings.
 */

import type { ViewNode } from './render.js'

export function toElement(
  node: ViewNode,
  onAction: (action: string) => void,
): HTMLElement {
  switch (node.kind) {
    case 'text': {
      const span = document.createElement('span')
      span.className = `text ${node.origin}`
      span.textContent = node.text
      return span
    }
    case 'button': {
      const button = document.createElement('button')
      button.textContent = node.label
      button.disabled = !node.enabled
      button.dataset.action = node.action
      button.addEventListener('click', () => onAction(node.action))
      return button
    }
    case 'listbox': {
      const select = document.createElement('select')
      select.className = node.name
      select.size = Math.max(2, node.items.length)
      node.items.forEach((item, i) => {
        const option = document.createElement('option')
        option.textContent =
          item.kind === 'text' ? item.text : `item ${i}`
        option.selected = node.selected === i
        select.appendChild(option)
      })
      return select
    }
    case 'panel': {
      const section = document.createElement('section')
      section.className = 'panel'
      const heading = document.createElement('h2')
      heading.textContent = node.name
      section.appendChild(heading)
      node.children.forEach((c) => section.appendChild(toElement(c, onAction)))
      return section
    }
    case 'group': {
      const div = document.createElement('div')
      div.className = 'group'
      node.children.forEach((c) => div.appendChild(toElement(c, onAction)))
      return div
    }
  }
}
