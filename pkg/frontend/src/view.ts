/** DOM rendering: menu of continuations grouped by category, sentence bar
 * with undo, live antecedent panel, and the completed sentence's tree with
 * closed-scope shading. Pure view over the Editor state; re-rendered on
 * every change.
 */

import { WireChild, WireTreeNode } from "./api.js";
import { Editor } from "./state.js";

export interface ViewOptions {
  filter: string;
}

const GROUP_LABELS: Record<string, string> = {
  det: "determiners",
  noun: "nouns",
  tv: "verbs",
  iv: "verbs",
  aux: "auxiliaries",
  prep: "prepositions",
  conj: "conjunctions",
  relpron: "relative pronouns",
  word: "words",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (name === "class") node.className = value;
    else node.setAttribute(name, value);
  }
  node.append(...children);
  return node;
}

export function renderSentence(editor: Editor): HTMLElement {
  const bar = el("div", { id: "sentence", class: "sentence" });
  for (const token of editor.tokens) {
    bar.append(el("span", { class: "committed-token" }, token));
  }
  if (editor.tokens.length === 0) {
    bar.append(el("span", { class: "hint" }, "compose a sentence from the menu below"));
  }
  const undo = el("button", { id: "undo", class: "undo" }, "undo");
  if (editor.pending || editor.tokens.length === 0) undo.setAttribute("disabled", "");
  undo.addEventListener("click", () => void editor.undo());
  bar.append(undo);
  if (editor.complete) {
    bar.append(el("span", { id: "complete-flag", class: "complete-flag" }, "complete sentence"));
  }
  return bar;
}

export function renderMenu(editor: Editor, view: ViewOptions): HTMLElement {
  const menu = el("div", { id: "menu", class: "menu" });
  const filter = view.filter.trim();
  for (const [category, options] of editor.groupedOptions()) {
    const visible = options.filter((o) => o.token.includes(filter));
    if (visible.length === 0) continue;
    const group = el("section", { class: "menu-group", "data-category": category });
    group.append(el("h3", {}, GROUP_LABELS[category] ?? category));
    const list = el("div", { class: "menu-tokens" });
    for (const option of visible) {
      const features = Object.entries(option.features)
        .map(([k, v]) => `${k}:${v}`)
        .join(", ");
      const button = el(
        "button",
        { class: "token-btn", "data-token": option.token, title: features },
        option.token,
      );
      if (editor.pending) button.setAttribute("disabled", "");
      button.addEventListener("click", () => void editor.commitToken(option.token));
      list.append(button);
    }
    group.append(list);
    menu.append(group);
  }
  if (menu.childElementCount === 0) {
    const message = editor.options.length === 0 ? "no continuations" : "no match for the filter";
    menu.append(el("p", { class: "hint" }, message));
  }
  return menu;
}

export function renderAntecedents(editor: Editor): HTMLElement {
  const panel = el("div", { id: "antecedents", class: "antecedents" });
  panel.append(el("h3", {}, "accessible antecedents"));
  if (editor.antecedents.length === 0) {
    panel.append(el("p", { class: "hint" }, "none yet"));
    return panel;
  }
  const list = el("ul", {});
  for (const antecedent of editor.antecedents) {
    const features = Object.entries(antecedent.features)
      .map(([k, v]) => `${k}:${v}`)
      .join(", ");
    list.append(
      el(
        "li",
        { class: "antecedent", "data-position": String(antecedent.position) },
        `@${antecedent.position} ${features}`,
      ),
    );
  }
  panel.append(list);
  return panel;
}

function collectScopeSpans(node: WireTreeNode): [number, number][] {
  const spans = [...node.scope_spans];
  for (const child of node.children) {
    if (child.kind === "node") spans.push(...collectScopeSpans(child));
  }
  return spans;
}

/** The sentence with every properly-nested closed scope shaded (spans
 * covering the whole sentence are listed but not shaded, to keep the
 * interesting region visible). */
export function renderScopeRibbon(editor: Editor, tree: WireTreeNode): HTMLElement {
  const n = editor.tokens.length;
  const spans = collectScopeSpans(tree).filter(([a, b]) => !(a === 0 && b === n));
  const ribbon = el("div", { class: "scope-ribbon" });
  editor.tokens.forEach((token, i) => {
    const covered = spans.some(([a, b]) => a <= i && i < b);
    ribbon.append(
      el("span", { class: covered ? "ribbon-token scope-closed" : "ribbon-token" }, token),
    );
  });
  return ribbon;
}

function renderChild(child: WireChild): HTMLElement {
  if (child.kind === "token") {
    return el("li", { class: "leaf token-leaf" }, `'${child.token}'`);
  }
  if (child.kind === "fwd_ref") {
    const features = Object.entries(child.features).map(([k, v]) => `${k}:${v}`).join(", ");
    return el("li", { class: "leaf fwd-ref" }, `>(${features}) @${child.position}`);
  }
  if (child.kind === "bwd_ref") {
    const features = Object.entries(child.features).map(([k, v]) => `${k}:${v}`).join(", ");
    return el(
      "li",
      { class: "leaf bwd-ref", "data-antecedent": String(child.antecedent_position) },
      `<(${features}) -> @${child.antecedent_position}`,
    );
  }
  if (child.kind === "scope_opener") {
    return el("li", { class: "leaf scope-opener" }, `// @${child.position}`);
  }
  return renderNode(child);
}

function renderNode(node: WireTreeNode): HTMLElement {
  const category = node.category;
  const features = category.features
    ? "(" + Object.entries(category.features).map(([k, v]) => `${k}:${v}`).join(", ") + ")"
    : "";
  const spans = node.scope_spans.map(([a, b]) => ` closes ${a}..${b}`).join(",");
  const item = el("li", { class: "tree-node" });
  item.append(
    el("span", { class: spans ? "node-label scope-closing" : "node-label" },
      `${category.name ?? ""}${features}${spans ? " ~" + spans : ""}`),
  );
  const children = el("ul", { class: "tree-children" });
  for (const child of node.children) children.append(renderChild(child));
  item.append(children);
  return item;
}

export function renderTrees(editor: Editor): HTMLElement {
  const section = el("div", { id: "tree-section", class: "tree-section" });
  if (!editor.complete) return section;
  const button = el("button", { id: "show-tree" }, "show syntax tree");
  if (editor.pending) button.setAttribute("disabled", "");
  button.addEventListener("click", () => void editor.showTree());
  section.append(button);
  if (editor.trees) {
    editor.trees.forEach((tree, index) => {
      const box = el("div", { class: "tree-box" });
      if (editor.trees!.length > 1) box.append(el("h3", {}, `derivation ${index + 1}`));
      box.append(renderScopeRibbon(editor, tree));
      const root = el("ul", { class: "tree" });
      root.append(renderNode(tree));
      box.append(root);
      section.append(box);
    });
  }
  return section;
}

/** Full re-render; the filter box survives via the shared view options. */
export function render(editor: Editor, container: HTMLElement, view: ViewOptions): void {
  container.replaceChildren();
  if (editor.notice) {
    container.append(el("p", { id: "notice", class: "notice" }, editor.notice));
  }
  container.append(renderSentence(editor));

  const filterBox = el("input", {
    id: "filter",
    type: "text",
    placeholder: "filter proposals (never submits)",
    value: view.filter,
  }) as HTMLInputElement;
  filterBox.value = view.filter;
  filterBox.addEventListener("input", () => {
    view.filter = filterBox.value;
    render(editor, container, view);
    const again = container.querySelector<HTMLInputElement>("#filter");
    again?.focus();
    again?.setSelectionRange(view.filter.length, view.filter.length);
  });
  container.append(filterBox);

  container.append(renderMenu(editor, view));
  container.append(renderAntecedents(editor));
  container.append(renderTrees(editor));
}
