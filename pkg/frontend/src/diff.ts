/** Unified diff rendering with the traced method's declaration line
 * highlighted on the new-file side. */

export interface DiffRenderOptions {
  highlightNewLine?: number;
}

interface DiffLine {
  kind: "meta" | "hunk" | "add" | "del" | "ctx";
  text: string;
  newLine: number | null;
}

const HUNK_RE = /^@@ -\d+(?:,\d+)? \+(\d+)(?:,\d+)? @@/;

export function parseUnifiedDiff(diffText: string): DiffLine[] {
  const lines: DiffLine[] = [];
  let newLine: number | null = null;
  for (const raw of diffText.split("\n")) {
    const hunk = HUNK_RE.exec(raw);
    if (hunk !== null) {
      newLine = Number(hunk[1]);
      lines.push({ kind: "hunk", text: raw, newLine: null });
      continue;
    }
    if (newLine === null) {
      if (raw !== "") {
        lines.push({ kind: "meta", text: raw, newLine: null });
      }
      continue;
    }
    if (raw.startsWith("+")) {
      lines.push({ kind: "add", text: raw, newLine });
      newLine += 1;
    } else if (raw.startsWith("-")) {
      lines.push({ kind: "del", text: raw, newLine: null });
    } else if (raw !== "" || newLine !== null) {
      lines.push({ kind: "ctx", text: raw, newLine });
      newLine += 1;
    }
  }
  return lines;
}

export function renderDiff(
  container: HTMLElement,
  diffText: string,
  options: DiffRenderOptions = {},
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const pre = doc.createElement("pre");
  pre.className = "diff";
  if (diffText.trim() === "") {
    const empty = doc.createElement("div");
    empty.className = "diff-empty";
    empty.textContent = "no changes to this file in the selected commit";
    container.appendChild(empty);
    return;
  }
  for (const line of parseUnifiedDiff(diffText)) {
    const el = doc.createElement("div");
    el.className = `diff-line diff-${line.kind}`;
    if (
      options.highlightNewLine !== undefined &&
      line.newLine === options.highlightNewLine
    ) {
      el.classList.add("diff-method-anchor");
    }
    el.textContent = line.text === "" ? " " : line.text;
    pre.appendChild(el);
  }
  container.appendChild(pre);
}
