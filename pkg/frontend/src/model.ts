/**
 * View-model for the dialog runner.
 *
 * Holds the loaded spec, the current session snapshot, an undo stack of
 * prior snapshots, and presentation state.  It never decides answerability
 * itself: the candidate list always comes from the service (either embedded
 * in the snapshot the service returned or re-fetched), so every
 * enable/disable decision in the UI is the engine's own judgment.
 */

import {
  ApiClient,
  ApiError,
  ExprTree,
  ParseResult,
  Rejection,
  Snapshot,
} from "./api.js";

export type Status =
  | { kind: "idle" }
  | { kind: "in-progress" }
  | { kind: "complete" }
  | { kind: "rejected"; reason: string };

export interface CandidateGroup {
  label: string;
  utterances: string[];
}

/** Names answered by a printed utterance ("a" or "{a, b}", payloads allowed). */
export function utteranceNames(utterance: string): string[] {
  const inner = utterance.startsWith("{")
    ? utterance.slice(1, -1)
    : utterance;
  return inner
    .split(",")
    .map((part) => part.trim().split("=")[0] ?? "")
    .filter((name) => name.length > 0);
}

/** The braced (or bare) utterance answering the given names. */
export function buildUtterance(names: string[]): string {
  const sorted = [...names].sort();
  return sorted.length === 1 ? sorted[0]! : `{${sorted.join(", ")}}`;
}

/** Every solicitation in the tree, depth-first. */
export function treeNames(tree: ExprTree): string[] {
  const out: string[] = [];
  const walk = (t: ExprTree): void => {
    if (t.kind === "atom" && t.name) out.push(t.name);
    for (const c of t.children ?? []) walk(c);
    if (t.left) walk(t.left);
    if (t.right) walk(t.right);
  };
  walk(tree);
  return out;
}

/**
 * Map each solicitation to the label of the top-level sub-dialog it lives
 * in, so candidate buttons can be grouped the way the weaving semantics
 * actually interleaves them.
 */
export function nameGroups(tree: ExprTree, printedChildren: string[]): Map<string, string> {
  const map = new Map<string, string>();
  const children = tree.kind === "node" ? tree.children ?? [] : [];
  if (children.length === 0) {
    for (const name of treeNames(tree)) map.set(name, "dialog");
    return map;
  }
  children.forEach((child, i) => {
    const label = printedChildren[i] ?? `sub-dialog ${i + 1}`;
    for (const name of treeNames(child)) map.set(name, label);
  });
  return map;
}

export class DialogRunner {
  specText = "";
  parsed: ParseResult | null = null;
  snapshot: Snapshot | null = null;
  undoStack: Snapshot[] = [];
  status: Status = { kind: "idle" };
  diagnostics = "";
  selection = new Set<string>();
  busy = false;

  constructor(private readonly api: ApiClient) {}

  /** Candidate utterances for the current snapshot, straight from the service. */
  get candidates(): string[] {
    return this.snapshot?.candidates ?? [];
  }

  /** Names answerable right now (union over candidate utterances). */
  get enabledNames(): Set<string> {
    const names = new Set<string>();
    for (const u of this.candidates) for (const n of utteranceNames(u)) names.add(n);
    return names;
  }

  get universe(): string[] {
    return this.parsed ? [...new Set(treeNames(this.parsed.tree))] : [];
  }

  get transcript(): string[] {
    return this.snapshot?.transcript ?? [];
  }

  /** The transcript as an episode, replayable by the CLI run command. */
  exportTranscript(): string {
    return `<${this.transcript.join(" ")}>`;
  }

  groupedCandidates(): CandidateGroup[] {
    if (!this.parsed) return [];
    const tree = this.parsed.tree;
    const printedChildren =
      tree.kind === "node" ? (tree.children ?? []).map(printTree) : [];
    const groups = nameGroups(tree, printedChildren);
    const byLabel = new Map<string, string[]>();
    for (const u of this.candidates) {
      const names = utteranceNames(u);
      const labels = new Set(names.map((n) => groups.get(n) ?? "dialog"));
      const label = labels.size === 1 ? [...labels][0]! : "across sub-dialogs";
      byLabel.set(label, [...(byLabel.get(label) ?? []), u]);
    }
    return [...byLabel.entries()].map(([label, utterances]) => ({ label, utterances }));
  }

  async loadSpec(text: string): Promise<void> {
    this.busy = true;
    this.diagnostics = "";
    try {
      this.parsed = await this.api.parse(text);
      this.snapshot = await this.api.sessionInit(text);
      this.specText = text;
      this.undoStack = [];
      this.selection.clear();
      this.status = this.snapshot.complete ? { kind: "complete" } : { kind: "in-progress" };
    } catch (err) {
      this.parsed = null;
      this.snapshot = null;
      this.status = { kind: "idle" };
      this.diagnostics = err instanceof ApiError ? err.message : String(err);
    } finally {
      this.busy = false;
    }
  }

  /** Submit one utterance; on rejection the state is kept untouched. */
  async submit(utterance: string): Promise<void> {
    if (!this.snapshot || this.busy) return;
    this.busy = true;
    try {
      const next = await this.api.sessionStep(this.snapshot, utterance);
      this.undoStack.push(this.snapshot);
      this.snapshot = next;
      this.selection.clear();
      this.status = next.complete ? { kind: "complete" } : { kind: "in-progress" };
    } catch (err) {
      if (err instanceof Rejection) {
        this.status = { kind: "rejected", reason: err.reason };
      } else {
        this.diagnostics = String(err);
      }
    } finally {
      this.busy = false;
    }
  }

  async submitSelection(): Promise<void> {
    if (this.selection.size === 0) return;
    await this.submit(buildUtterance([...this.selection]));
  }

  toggleSelect(name: string): void {
    if (this.selection.has(name)) this.selection.delete(name);
    else this.selection.add(name);
  }

  /** Restore the exactly-prior snapshot. */
  undo(): void {
    const prior = this.undoStack.pop();
    if (!prior) return;
    this.snapshot = prior;
    this.selection.clear();
    this.status = prior.complete ? { kind: "complete" } : { kind: "in-progress" };
  }

  async reset(): Promise<void> {
    if (this.specText) await this.loadSpec(this.specText);
  }

  /** Largest constructor-stack depth across the live frontier (inspector aid). */
  frontierDepth(): number {
    return Math.max(0, ...(this.snapshot?.frontier ?? []).map((s) => s.stack.length));
  }

  /** The live expression(s): current per frontier state, deduplicated. */
  liveExpressions(): string[] {
    return [...new Set((this.snapshot?.frontier ?? []).map((s) => s.current))];
  }
}

/** Reprint a structured tree (labels only; the engine's print is canonical). */
export function printTree(t: ExprTree): string {
  switch (t.kind) {
    case "empty":
      return "~";
    case "atom":
      return (t.name ?? "?") + "^".repeat(t.arrows ?? 0);
    case "node":
      return (
        (t.mnemonic ?? "?") +
        "^".repeat(t.arrows ?? 0) +
        "[" +
        (t.children ?? []).map(printTree).join(", ") +
        "]"
      );
    case "union": {
      const right = t.right!;
      const rightText = right.kind === "union" ? `(${printTree(right)})` : printTree(right);
      return `${printTree(t.left!)} | ${rightText}`;
    }
  }
}
