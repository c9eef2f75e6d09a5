/** DOM side panel: connection state, selection, committed instructions with
 * live executor progress, and the menu buttons. */

import type { ClientState } from "./state.js";
import { parseInstructionLine } from "./protocol.js";
import type { MenuAction } from "./protocol.js";

export class Hud {
  private root: HTMLElement;
  private status: HTMLElement;
  private mode: HTMLElement;
  private selection: HTMLElement;
  private instructions: HTMLElement;

  constructor(root: HTMLElement, onMenu: (action: MenuAction) => void) {
    this.root = root;
    root.innerHTML = `
      <h1>ghost session</h1>
      <div class="row"><span id="conn" class="badge">connecting</span>
        <span id="mode" class="badge">idle</span></div>
      <div class="section"><h2>selection</h2><div id="selection">none</div></div>
      <div class="section buttons">
        <button data-action="commit">commit (C)</button>
        <button data-action="set_default">set default (D)</button>
        <button data-action="begin_fill">begin fill (F)</button>
        <button data-action="end_fill">end fill (G)</button>
      </div>
      <div class="section"><h2>instructions</h2><div id="instructions">none committed</div></div>
      <div class="help">left mouse: trigger / lasso / carry (shift = height)<br>
        right mouse: orbit, wheel: zoom</div>
    `;
    this.status = root.querySelector("#conn")!;
    this.mode = root.querySelector("#mode")!;
    this.selection = root.querySelector("#selection")!;
    this.instructions = root.querySelector("#instructions")!;
    for (const button of root.querySelectorAll<HTMLButtonElement>("button[data-action]")) {
      button.addEventListener("click", () =>
        onMenu(button.dataset.action as MenuAction),
      );
    }
  }

  setConnection(text: string): void {
    this.status.textContent = text;
  }

  sync(state: ClientState): void {
    this.mode.textContent = state.mode;
    this.selection.textContent = state.selection.ids.length
      ? state.selection.ids.join(", ")
      : "none";

    if (state.instructions.length === 0) {
      this.instructions.textContent = "none committed";
      return;
    }
    const rows = state.instructions.map((line) => {
      const instr = parseInstructionLine(line);
      if (!instr) return `<div class="instr">unparsable line</div>`;
      const status = state.statuses.get(instr.seq);
      let badge = "queued";
      if (status) {
        badge =
          status.state === "in_progress"
            ? `${Math.round((status.progress ?? 0) * 100)}%`
            : status.state;
      }
      const detail =
        instr.kind === "fill"
          ? `level ${instr.target_level?.toFixed(2)}`
          : instr.kind === "compress"
            ? `factor ${instr.target_factor?.toFixed(2)}`
            : "";
      return `<div class="instr"><span>#${instr.seq} ${instr.kind} ${instr.object_id} ${detail}</span>
        <span class="badge ${status?.state ?? ""}">${badge}</span></div>`;
    });
    this.instructions.innerHTML = rows.join("");
  }
}
