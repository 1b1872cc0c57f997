import { createApp } from "./app.js";

const PORT = Number(process.env.PORT ?? 8787);

const app = createApp();
const server = app.listen(PORT, () => {
  console.log(`embed-sidecar listening on http://127.0.0.1:${PORT}`);
});

const shutdown = (signal: string) => {
  console.log(`${signal} received, closing`);
  server.close(() => process.exit(0));
};
process.on("SIGINT", () => shutdown("SIGINT"));
process.on("SIGTERM", () => shutdown("SIGTERM"));
