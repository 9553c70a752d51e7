/**
 * DOM wiring: render the DialogRunner into the page and route events back
 * into it.  All rendering is a pure function of the view-model; after every
 * action the page re-renders.
 */

import { HttpApiClient } from "./api.js";
import { DialogRunner, utteranceNames } from "./model.js";
import { PRESETS } from "./presets.js";

// Same-origin by default; override with ?api=http://host:port for a
// service running elsewhere.
const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const api = new HttpApiClient(apiBase);
const runner = new DialogRunner(api);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  node.append(...children);
  return node;
}

function banner(): HTMLElement {
  const s = runner.status;
  switch (s.kind) {
    case "idle":
      return el("div", { class: "banner idle" }, "load a dialog to begin");
    case "in-progress":
      return el("div", { class: "banner progress" }, "dialog in progress");
    case "complete":
      return el("div", { class: "banner complete" }, "dialog complete ✓");
    case "rejected":
      return el("div", { class: "banner rejected" }, `rejected: ${s.reason}`);
  }
}

function candidatePanel(): HTMLElement {
  const panel = el("div", { class: "panel" }, el("h2", {}, "respond"));
  if (!runner.snapshot) return panel;
  const enabled = runner.enabledNames;

  for (const group of runner.groupedCandidates()) {
    const box = el("div", { class: "group" }, el("h3", {}, group.label));
    for (const utterance of group.utterances) {
      const button = el("button", { class: "candidate" }, utterance);
      button.addEventListener("click", () => {
        void runner.submit(utterance).then(render);
      });
      box.append(button);
    }
    panel.append(box);
  }

  // Whole-universe view: names the engine rejects right now are disabled.
  const all = el("div", { class: "group" }, el("h3", {}, "all solicitations"));
  for (const name of runner.universe) {
    const answered = runner.transcript.some((t) => utteranceNames(t).includes(name));
    const button = el(
      "button",
      { class: "name" + (enabled.has(name) ? "" : " disabled") },
      name,
    );
    if (!enabled.has(name) || answered) button.setAttribute("disabled", "true");
    button.addEventListener("click", () => {
      void runner.submit(name).then(render);
    });
    all.append(button);
  }
  panel.append(all);

  // Multi-select for grouped answers when the engine permits grouping.
  const multi = el("div", { class: "group" }, el("h3", {}, "grouped utterance"));
  for (const name of runner.universe) {
    const id = `sel-${name}`;
    const input = el("input", { type: "checkbox", id }) as HTMLInputElement;
    input.checked = runner.selection.has(name);
    if (!enabled.has(name)) input.setAttribute("disabled", "true");
    input.addEventListener("change", () => {
      runner.toggleSelect(name);
      render();
    });
    multi.append(el("label", { for: id }, input, name));
  }
  const go = el("button", { class: "submit" }, "submit selection");
  if (runner.selection.size === 0) go.setAttribute("disabled", "true");
  go.addEventListener("click", () => {
    void runner.submitSelection().then(render);
  });
  multi.append(go);
  panel.append(multi);
  return panel;
}

function transcriptPanel(): HTMLElement {
  const panel = el("div", { class: "panel" }, el("h2", {}, "transcript"));
  const list = el("ol", {});
  for (const turn of runner.transcript) list.append(el("li", {}, turn));
  panel.append(list);
  const undo = el("button", {}, "undo");
  if (runner.undoStack.length === 0) undo.setAttribute("disabled", "true");
  undo.addEventListener("click", () => {
    runner.undo();
    render();
  });
  const reset = el("button", {}, "reset");
  reset.addEventListener("click", () => {
    void runner.reset().then(render);
  });
  const exportBtn = el("button", {}, "copy episode");
  exportBtn.addEventListener("click", () => {
    void navigator.clipboard.writeText(runner.exportTranscript());
  });
  panel.append(el("div", { class: "row" }, undo, reset, exportBtn));
  panel.append(el("code", { class: "episode" }, runner.exportTranscript()));
  return panel;
}

function inspectorPanel(): HTMLElement {
  const panel = el("div", { class: "panel" }, el("h2", {}, "expression inspector"));
  if (!runner.snapshot) return panel;
  for (const expr of runner.liveExpressions()) {
    panel.append(el("pre", { class: "expr" }, expr));
  }
  panel.append(
    el(
      "div",
      { class: "meta" },
      `frontier: ${runner.snapshot.frontier.length} state(s), ` +
        `constructor stack depth ${runner.frontierDepth()}`,
    ),
  );
  return panel;
}

function loaderPanel(): HTMLElement {
  const select = el("select", { id: "preset" }) as HTMLSelectElement;
  select.append(el("option", { value: "" }, "presets…"));
  for (const p of PRESETS) select.append(el("option", { value: p.spec }, p.name));
  const area = el("textarea", { rows: "3", id: "spec" }) as HTMLTextAreaElement;
  area.value = runner.specText;
  select.addEventListener("change", () => {
    if (select.value) area.value = select.value;
  });
  const load = el("button", { class: "submit" }, "load");
  load.addEventListener("click", () => {
    void runner.loadSpec(area.value).then(render);
  });
  const diag = el("pre", { class: "diagnostics" }, runner.diagnostics);
  return el("div", { class: "panel" }, el("h2", {}, "dialog"), select, area, load, diag);
}

function render(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren(
    el("h1", {}, "dialogweave runner"),
    loaderPanel(),
    banner(),
    candidatePanel(),
    transcriptPanel(),
    inspectorPanel(),
  );
}

document.addEventListener("DOMContentLoaded", render);
