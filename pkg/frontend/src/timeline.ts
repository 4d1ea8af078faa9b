/** Change timeline rendering: one row per history record, newest first,
 * with kind badges and before/after labels. */

import type { HistoryDocument, HistoryRecord } from "./api";

export function shortHash(hash: string): string {
  return hash.slice(0, 8);
}

export function movementLabel(record: HistoryRecord): string {
  const parts: string[] = [];
  if (record.file_before !== record.file_after) {
    parts.push(`${record.file_before} → ${record.file_after}`);
  }
  if (record.name_before !== record.name_after) {
    parts.push(`${record.name_before}() → ${record.name_after}()`);
  }
  return parts.join("  ");
}

export function renderTimeline(
  container: HTMLElement,
  document_: HistoryDocument,
  onSelect: (record: HistoryRecord, row: HTMLElement) => void,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  const heading = doc.createElement("div");
  heading.className = "timeline-heading";
  heading.textContent = `${document_.method} — ${document_.records.length} change commit(s)` +
    (document_.complete ? "" : " (incomplete)");
  container.appendChild(heading);

  const list = doc.createElement("ul");
  list.className = "timeline";
  for (const record of document_.records) {
    const row = doc.createElement("li");
    row.className = "timeline-row";
    row.dataset.hash = record.hash;

    const hash = doc.createElement("code");
    hash.className = "row-hash";
    hash.textContent = shortHash(record.hash);
    row.appendChild(hash);

    const date = doc.createElement("span");
    date.className = "row-date";
    date.textContent = record.commit_time.slice(0, 10);
    row.appendChild(date);

    const author = doc.createElement("span");
    author.className = "row-author";
    author.textContent = record.author_name;
    row.appendChild(author);

    const badges = doc.createElement("span");
    badges.className = "row-badges";
    for (const kind of record.kinds) {
      const badge = doc.createElement("span");
      badge.className = `badge badge-${kind.toLowerCase()}`;
      badge.textContent = kind;
      badges.appendChild(badge);
    }
    row.appendChild(badges);

    const movement = movementLabel(record);
    if (movement) {
      const label = doc.createElement("span");
      label.className = "row-movement";
      label.textContent = movement;
      row.appendChild(label);
    }

    const message = doc.createElement("span");
    message.className = "row-message";
    message.textContent = record.message;
    row.appendChild(message);

    row.addEventListener("click", () => {
      for (const sibling of Array.from(list.children)) {
        sibling.classList.remove("selected");
      }
      row.classList.add("selected");
      onSelect(record, row);
    });
    list.appendChild(row);
  }
  container.appendChild(list);
}
