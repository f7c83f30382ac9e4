/** Categorical colors keyed by dendrogram node id.
 *
 * A cluster keeps its color across refine steps as long as its cut-set node
 * survives; new nodes get the next free color.
 */

export const PALETTE = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951", "#ff8ab7",
  "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0", "#094bad", "#bd9f39",
];

export class ColorAssigner {
  private assigned = new Map<number, string>();
  private next = 0;

  colorFor(nodeId: number): string {
    const existing = this.assigned.get(nodeId);
    if (existing !== undefined) {
      return existing;
    }
    const color = PALETTE[this.next % PALETTE.length];
    this.next += 1;
    this.assigned.set(nodeId, color);
    return color;
  }
}
