/** Bootstrap: connect to the service, offer the grammar list, and keep the
 * view in sync with the editor state. Configuration is limited to the
 * service base URL (?service=http://host:port, default localhost:8000). */

import { ServiceClient } from "./api.js";
import { Editor } from "./state.js";
import { render, ViewOptions } from "./view.js";

function baseUrl(): string {
  const param = new URLSearchParams(window.location.search).get("service");
  return param ?? "http://127.0.0.1:8000";
}

export async function boot(root: HTMLElement): Promise<Editor> {
  const client = new ServiceClient(baseUrl());
  const editor = new Editor(client);
  const view: ViewOptions = { filter: "" };

  const picker = document.createElement("select");
  picker.id = "grammar-picker";
  const grammars = await client.listGrammars();
  for (const grammar of grammars) {
    const option = document.createElement("option");
    option.value = grammar.id;
    option.textContent = `${grammar.id} (${grammar.rule_count} rules)`;
    picker.append(option);
  }
  const editorPane = document.createElement("div");
  editorPane.id = "editor";
  root.replaceChildren(picker, editorPane);

  editor.onChange(() => render(editor, editorPane, view));
  picker.addEventListener("change", () => {
    view.filter = "";
    void editor.start(picker.value);
  });
  if (grammars.length > 0) {
    await editor.start(grammars[0].id);
  }
  return editor;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app")!).catch((error) => {
    const app = document.getElementById("app")!;
    app.textContent = `cannot reach the completion service: ${error}`;
  });
}
