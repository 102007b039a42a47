public class Main {
  public static void main(String[] args) {
    int e = 1;
    int = e;
  }
}
