/** DOM wiring: file loading, two-column rendering with SVG link lines,
 * the annotation panel, keyboard navigation, and saving. All decisions live
 * in the pure modules; this file only binds them to elements. */

import { AnnotationSession, INCORRECT_LINK_DISPLAY, parseJsonl, postAnnotations, toJsonl } from "./annotate.js";
import { assertValid } from "./schema.js";
import type { Cell, ViewModel } from "./viewmodel.js";
import { buildViewModel } from "./viewmodel.js";
import type { VizDocument } from "./types.js";

interface AppState {
  doc: VizDocument;
  view: ViewModel;
  session: AnnotationSession;
  cursor: number; // index into view.editOrder
}

let state: AppState | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
};

function showError(message: string): void {
  const panel = $("error-panel");
  panel.textContent = message;
  panel.classList.toggle("hidden", message.length === 0);
}

function loadDocument(raw: string): void {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (err) {
    showError(`not JSON: ${String(err)}`);
    return;
  }
  let doc: VizDocument;
  try {
    doc = assertValid(parsed);
  } catch (err) {
    showError(String(err));
    return;
  }
  showError("");
  const view = buildViewModel(doc);
  state = { doc, view, session: new AnnotationSession(doc), cursor: 0 };
  render();
}

function cellElement(cell: Cell): HTMLElement {
  const el = document.createElement("div");
  el.className = `cell ${cell.action}` + (cell.moved ? " moved" : "");
  el.dataset.editKey = cell.editKey;
  el.dataset.side = cell.side;
  el.dataset.index = String(cell.index);
  const head = document.createElement("div");
  head.className = "cell-head";
  head.textContent =
    `${cell.side === "old" ? "v1" : "v2"} #${cell.index} · ${cell.action}` +
    (cell.moved ? ` · moved ${cell.indexDelta! > 0 ? "+" : ""}${cell.indexDelta}` : "");
  el.appendChild(head);
  const body = document.createElement("div");
  body.className = "cell-body";
  if (cell.diff !== null) {
    for (const segment of cell.diff) {
      if (cell.side === "old" && segment.kind === "added") continue;
      if (cell.side === "new" && segment.kind === "removed") continue;
      const span = document.createElement("span");
      span.className = segment.kind === "same" ? "w-same" : `w-${segment.kind}`;
      span.textContent = segment.text + " ";
      body.appendChild(span);
    }
  } else {
    body.textContent = cell.text;
  }
  el.appendChild(body);
  if (cell.score !== null) {
    el.title = `link score ${cell.score.toFixed(3)}`;
  }
  el.addEventListener("click", () => selectEdit(cell.editKey));
  return el;
}

function render(): void {
  if (state === null) return;
  const { view } = state;
  $("doc-title").textContent =
    `${view.articleId} · v${state.doc.old_version} -> v${state.doc.new_version}`;
  const oldCol = $("old-column");
  const newCol = $("new-column");
  oldCol.replaceChildren();
  newCol.replaceChildren();
  for (const cell of view.oldCells) oldCol.appendChild(cellElement(cell));
  for (const cell of view.newCells) newCol.appendChild(cellElement(cell));
  requestAnimationFrame(drawLines);
  renderPanel();
}

function drawLines(): void {
  if (state === null) return;
  const svg = $("link-lines") as unknown as SVGSVGElement;
  const wrap = $("columns");
  svg.setAttribute("width", String(wrap.scrollWidth));
  svg.setAttribute("height", String(wrap.scrollHeight));
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  const wrapBox = wrap.getBoundingClientRect();
  for (const line of state.view.lines) {
    const oldEl = document.querySelector(
      `[data-side="old"][data-index="${line.oldIndex}"]`,
    );
    const newEl = document.querySelector(
      `[data-side="new"][data-index="${line.newIndex}"]`,
    );
    if (oldEl === null || newEl === null) continue;
    const a = oldEl.getBoundingClientRect();
    const b = newEl.getBoundingClientRect();
    const path = document.createElementNS("http://www.w3.org/2000/svg", "line");
    path.setAttribute("x1", String(a.right - wrapBox.left));
    path.setAttribute("y1", String(a.top + a.height / 2 - wrapBox.top));
    path.setAttribute("x2", String(b.left - wrapBox.left));
    path.setAttribute("y2", String(b.top + b.height / 2 - wrapBox.top));
    path.setAttribute("class", `line ${line.action}${line.moved ? " moved" : ""}`);
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = `score ${line.score.toFixed(3)}`;
    path.appendChild(title);
    svg.appendChild(path);
  }
}

function selectEdit(editKey: string): void {
  if (state === null) return;
  const at = state.view.editOrder.indexOf(editKey);
  if (at >= 0) state.cursor = at;
  renderPanel();
}

function currentKey(): string | null {
  if (state === null || state.view.editOrder.length === 0) return null;
  return state.view.editOrder[state.cursor];
}

function renderPanel(): void {
  if (state === null) return;
  const key = currentKey();
  document
    .querySelectorAll(".cell.selected")
    .forEach((el) => el.classList.remove("selected"));
  if (key === null) return;
  document
    .querySelectorAll(`[data-edit-key="${key}"]`)
    .forEach((el) => el.classList.add("selected"));

  const record = state.view.recordsByKey.get(key);
  $("panel-edit").textContent = record
    ? `${record.action} (${key})`
    : key;
  const selection = state.session.selection(key);
  const list = $("label-list");
  list.replaceChildren();
  for (const label of selection.labels) {
    const row = document.createElement("li");
    row.textContent = label;
    if (label === INCORRECT_LINK_DISPLAY && selection.rejectedIndex !== null) {
      row.textContent += ` (rejects #${selection.rejectedIndex})`;
    }
    const remove = document.createElement("button");
    remove.textContent = "x";
    remove.addEventListener("click", () => {
      state!.session.removeLabel(key, label);
      renderPanel();
    });
    row.appendChild(remove);
    list.appendChild(row);
  }

  const picker = $("label-picker") as HTMLSelectElement;
  if (picker.options.length === 0) {
    for (const label of state.session.manifest().labels) {
      const option = document.createElement("option");
      option.value = label.display;
      option.textContent = `${label.coarse}: ${label.display}`;
      option.title = label.definition;
      picker.appendChild(option);
    }
  }
}

function wire(): void {
  const fileInput = $("file-input") as HTMLInputElement;
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (file) loadDocument(await file.text());
  });

  $("add-label").addEventListener("click", () => {
    const key = currentKey();
    if (state === null || key === null) return;
    const picker = $("label-picker") as HTMLSelectElement;
    try {
      if (picker.value === INCORRECT_LINK_DISPLAY) {
        const raw = window.prompt(
          "Index of the sentence in the other version that must NOT link:",
        );
        if (raw === null) return;
        state.session.markIncorrectLink(key, Number(raw));
      } else {
        state.session.addLabel(key, picker.value);
      }
      showError("");
    } catch (err) {
      showError(String(err));
    }
    renderPanel();
  });

  $("save-button").addEventListener("click", async () => {
    if (state === null) return;
    const blockers = state.session.saveBlockers();
    if (blockers.length > 0) {
      showError(blockers.join("\n"));
      return;
    }
    const annotator =
      ($("annotator-id") as HTMLInputElement).value || "anonymous";
    const records = state.session.toRecords(
      annotator,
      new Date().toISOString().replace(/\.\d+Z$/, "Z"),
    );
    const jsonl = toJsonl(records);
    const blob = new Blob([jsonl], { type: "application/jsonl" });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = `annotations-${annotator}.jsonl`;
    anchor.click();
    const server = ($("server-base") as HTMLInputElement).value.trim();
    if (server.length > 0) {
      try {
        const saved = await postAnnotations(server, annotator, records);
        showError("");
        $("save-status").textContent = `saved ${saved} to server`;
      } catch (err) {
        showError(String(err));
      }
    }
  });

  $("load-annotations") .addEventListener("change", async (event) => {
    if (state === null) return;
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      state.session.loadRecords(parseJsonl(await file.text()));
      showError("");
    } catch (err) {
      showError(String(err));
    }
    renderPanel();
  });

  document.addEventListener("keydown", (event) => {
    if (state === null) return;
    if (event.key === "j" || event.key === "ArrowDown") {
      state.cursor = Math.min(
        state.cursor + 1,
        state.view.editOrder.length - 1,
      );
      renderPanel();
    } else if (event.key === "k" || event.key === "ArrowUp") {
      state.cursor = Math.max(state.cursor - 1, 0);
      renderPanel();
    }
  });

  window.addEventListener("resize", drawLines);
}

document.addEventListener("DOMContentLoaded", wire);
