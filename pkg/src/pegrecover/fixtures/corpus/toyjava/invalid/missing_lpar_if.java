public class Main {
  public static void main(String[] args) {
    int a = 2;
    if a == 2) a = 3;
  }
}
