import { ConsoleSession } from "./socket";
import { ConsoleStore } from "./store";
import { initUi } from "./ui";

const store = new ConsoleStore();
const session = new ConsoleSession(store);
initUi(store, session);

const params = new URLSearchParams(window.location.search);
const addr = params.get("addr");
if (addr !== null) {
  const input = document.getElementById("addr") as HTMLInputElement;
  input.value = addr;
  session.connect(addr);
}
