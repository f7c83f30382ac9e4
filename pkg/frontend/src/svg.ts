/** Tiny SVG document builder: plain descriptor objects rendered to markup.
 *
 * Renderers return descriptors so tests can assert on structure without a
 * DOM; the page turns them into strings at the very end.
 */

export interface SvgNode {
  tag: string;
  attrs?: Record<string, string | number>;
  children?: SvgNode[];
  text?: string;
}

const escapeText = (value: string) =>
  value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const escapeAttr = (value: string) => escapeText(value).replace(/"/g, "&quot;");

export function renderSvg(node: SvgNode): string {
  const attrs = Object.entries(node.attrs ?? {})
    .map(([key, value]) => ` ${key}="${escapeAttr(String(value))}"`)
    .join("");
  const inner =
    (node.text !== undefined ? escapeText(node.text) : "") +
    (node.children ?? []).map(renderSvg).join("");
  return `<${node.tag}${attrs}>${inner}</${node.tag}>`;
}

export function findAll(node: SvgNode, tag: string): SvgNode[] {
  const out: SvgNode[] = [];
  const walk = (current: SvgNode) => {
    if (current.tag === tag) {
      out.push(current);
    }
    (current.children ?? []).forEach(walk);
  };
  walk(node);
  return out;
}
